use std::fmt::Write;

use super::{SpinTrajectory, Trajectory};

fn push_row(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    let _ = writeln!(out, "{}", row.join(","));
}

/// Columns `t, re_alpha, im_alpha, eta, fidelity`.
pub fn fock_trajectory_csv(tr: &Trajectory) -> String {
    let mut out = String::from("t,re_alpha,im_alpha,eta,fidelity\n");
    for k in 0..tr.times.len() {
        push_row(
            &mut out,
            &[
                tr.times[k],
                tr.alpha_track[k].re,
                tr.alpha_track[k].im,
                tr.eta_track[k],
                tr.cs_fidelity[k],
            ],
        );
    }
    out
}

/// Columns `t, re_zeta, im_zeta, theta, phi, fidelity`. At the antipode,
/// where `ζ` is infinite, the `ζ` columns read `inf`.
pub fn spin_trajectory_csv(tr: &SpinTrajectory) -> String {
    let mut out = String::from("t,re_zeta,im_zeta,theta,phi,fidelity\n");
    for k in 0..tr.times.len() {
        let fit = &tr.zeta_track[k];
        let z = fit
            .point
            .zeta()
            .unwrap_or(num_complex::Complex64::new(f64::INFINITY, f64::INFINITY));
        push_row(
            &mut out,
            &[tr.times[k], z.re, z.im, fit.theta, fit.phi, tr.cs_fidelity[k]],
        );
    }
    out
}

//! Derivative-free minimization: Nelder–Mead with dimension-adaptive
//! coefficients, plus a finite-difference Newton polish for 2-D problems.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    /// Stop when the simplex values span less than this.
    pub f_tol: f64,
    /// ...and the simplex vertices are within this of the best one.
    pub x_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            f_tol: 1e-12,
            x_tol: 1e-9,
            max_evals: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(x0, &mut evals);
        return Minimum {
            x: Vec::new(),
            value,
            evals,
        };
    }

    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = (worst - best).abs();
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (spread <= opts.f_tol && size <= opts.x_tol) || evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let towards = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = towards(alpha, &simplex[n].0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = towards(gamma, &simplex[n].0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = towards(rho, &simplex[n].0);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = towards(-rho, &simplex[n].0);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + sigma * (v - b))
                .collect();
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evals }
}

/// Restarts Nelder–Mead from its own optimum until a restart improves the
/// value by less than `opts.f_tol` (at most `max_restarts` times).
pub fn nelder_mead_restarted<F>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
    max_restarts: usize,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best = nelder_mead(&mut f, x0, opts);
    let mut step = opts.initial_step;
    for _ in 0..max_restarts {
        step = (step * 0.5).max(opts.x_tol * 10.0);
        let local = NelderMeadOptions {
            initial_step: step,
            ..*opts
        };
        let next = nelder_mead(&mut f, &best.x, &local);
        let evals = best.evals + next.evals;
        let improved = best.value - next.value;
        if next.value < best.value {
            best = Minimum { evals, ..next };
        } else {
            best.evals = evals;
        }
        if improved <= opts.f_tol {
            break;
        }
    }
    best
}

/// Newton iterations on a smooth 2-D objective with central-difference
/// derivatives; a step is kept only if it does not increase the value.
pub fn newton_polish_2d<F>(mut f: F, x: [f64; 2], h: f64, iterations: usize) -> ([f64; 2], f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let mut x = x;
    let mut fx = f(&x);
    for _ in 0..iterations {
        let e = |dx: f64, dy: f64, f: &mut F| f(&[x[0] + dx, x[1] + dy]);
        let fpx = e(h, 0.0, &mut f);
        let fmx = e(-h, 0.0, &mut f);
        let fpy = e(0.0, h, &mut f);
        let fmy = e(0.0, -h, &mut f);
        let fpp = e(h, h, &mut f);
        let fpm = e(h, -h, &mut f);
        let fmp = e(-h, h, &mut f);
        let fmm = e(-h, -h, &mut f);
        let gx = (fpx - fmx) / (2.0 * h);
        let gy = (fpy - fmy) / (2.0 * h);
        let hxx = (fpx - 2.0 * fx + fmx) / (h * h);
        let hyy = (fpy - 2.0 * fx + fmy) / (h * h);
        let hxy = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        let det = hxx * hyy - hxy * hxy;
        if !(det > 0.0 && hxx > 0.0) {
            break;
        }
        let dx = -(hyy * gx - hxy * gy) / det;
        let dy = -(-hxy * gx + hxx * gy) / det;
        if !(dx.is_finite() && dy.is_finite()) || dx.hypot(dy) > 10.0 * h.max(1e-3) {
            break;
        }
        let cand = [x[0] + dx, x[1] + dy];
        let fc = f(&cand);
        if fc <= fx {
            x = cand;
            fx = fc;
        } else {
            break;
        }
        if dx.hypot(dy) < 1e-14 {
            break;
        }
    }
    (x, fx)
}

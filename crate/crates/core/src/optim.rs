//! Classical Nelder-Mead simplex search, derivative free.
//!
//! Coefficients are the textbook ones: reflection 1, expansion 2,
//! contraction 0.5, shrink 0.5. Convergence is declared when the simplex
//! cost spread falls below a relative tolerance; hitting the iteration cap
//! instead marks the result as stalled but still returns the best iterate.
//! Cost functions may return +inf to mark infeasible points.

/// Outcome of one simplex run.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub stalled: bool,
    /// Best cost seen after each iteration, nonincreasing.
    pub best_trace: Vec<f64>,
}

/// Minimizes f starting from a simplex with vertex x0 and per-coordinate
/// initial steps.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    max_iter: usize,
    ftol: f64,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    debug_assert_eq!(steps.len(), n);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut xi = x0.to_vec();
        xi[i] += steps[i];
        simplex.push(xi);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    let mut best_trace = Vec::new();
    let mut iterations = 0;
    let mut stalled = true;
    for _ in 0..max_iter {
        iterations += 1;
        // Order best to worst; stable sort keeps runs deterministic when
        // several vertices share a cost (for example +inf).
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        fv = idx.iter().map(|&i| fv[i]).collect();
        best_trace.push(fv[0]);
        if (fv[n] - fv[0]).abs() <= ftol * (fv[0].abs() + ftol) {
            stalled = false;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut xc = vec![0.0; n];
        for x in &simplex[..n] {
            for (c, v) in xc.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = xc.iter().zip(&worst).map(|(c, w)| c + (c - w)).collect();
        let fr = f(&reflect);
        if fr < fv[0] {
            let expand: Vec<f64> = xc
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let fe = f(&expand);
            if fe < fr {
                simplex[n] = expand;
                fv[n] = fe;
            } else {
                simplex[n] = reflect;
                fv[n] = fr;
            }
        } else if fr < fv[n - 1] {
            simplex[n] = reflect;
            fv[n] = fr;
        } else {
            let contract: Vec<f64> = xc
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + 0.5 * (w - c))
                .collect();
            let fk = f(&contract);
            if fk < fv[n] {
                simplex[n] = contract;
                fv[n] = fk;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, v)| b + 0.5 * (v - b))
                        .collect();
                    fv[i] = f(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
    }

    let mut ib = 0;
    for i in 1..=n {
        if fv[i] < fv[ib] {
            ib = i;
        }
    }
    best_trace.push(fv[ib]);
    NelderMeadResult {
        x: simplex[ib].clone(),
        fx: fv[ib],
        iterations,
        stalled,
        best_trace,
    }
}

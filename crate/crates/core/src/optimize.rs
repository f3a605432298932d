//! Deterministic numerical optimizers: golden-section search, grid-bracketed
//! refinement and a fixed-schedule Nelder–Mead simplex. No stochastic search
//! anywhere, so sweeps reproduce bit for bit.

use crate::scalar::Scalar;

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)` once the bracket is narrower than `xtol` or
/// `max_iter` evaluations were spent.
pub fn golden_max<T: Scalar>(
    f: impl Fn(T) -> T,
    mut a: T,
    mut b: T,
    xtol: T,
    max_iter: usize,
) -> (T, T) {
    // 2 - phi
    let resp = T::of(2.0 - 1.618_033_988_749_895);
    let mut x1 = a + resp * (b - a);
    let mut x2 = b - resp * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 2;
    while iter < max_iter && (b - a).abs() > xtol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + resp * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - resp * (b - a);
            f2 = f(x2);
        }
        iter += 1;
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
pub fn golden_min<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, xtol: T, max_iter: usize) -> (T, T) {
    let (x, fneg) = golden_max(|x| -f(x), a, b, xtol, max_iter);
    (x, -fneg)
}

/// Evaluates `f` on `grid`, brackets the best point by its neighbours and
/// refines with golden-section search. The grid must be sorted ascending.
pub fn grid_then_golden_max<T: Scalar>(f: impl Fn(T) -> T, grid: &[T], xtol: T) -> (T, T) {
    assert!(!grid.is_empty(), "empty search grid");
    let mut best = 0;
    let mut best_val = f(grid[0]);
    for (i, &x) in grid.iter().enumerate().skip(1) {
        let v = f(x);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if hi <= lo {
        return (grid[best], best_val);
    }
    let (x, v) = golden_max(&f, lo, hi, xtol, 200);
    if v >= best_val {
        (x, v)
    } else {
        (grid[best], best_val)
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive. Both endpoints are
/// exact, so downstream range checks never see rounding overshoot.
pub fn linspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / T::of((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + step * T::of(i as f64)
            }
        })
        .collect()
}

/// `n` logarithmically spaced points from `a` to `b` inclusive (both > 0).
pub fn logspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    linspace(a.ln(), b.ln(), n)
        .into_iter()
        .map(|x| x.exp())
        .collect()
}

/// Deterministic Nelder–Mead minimization with standard coefficients and a
/// fixed iteration budget. Good enough as an independent cross-check path
/// for the smooth low-dimensional objectives in this crate.
pub fn nelder_mead_min<T: Scalar, const N: usize>(
    f: impl Fn(&[T; N]) -> T,
    start: [T; N],
    step: T,
    iters: usize,
) -> ([T; N], T) {
    let alpha = T::one();
    let gamma = T::of(2.0);
    let rho = T::of(0.5);
    let sigma = T::of(0.5);

    let mut simplex: Vec<([T; N], T)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for i in 0..N {
        let mut p = start;
        p[i] = p[i] + step;
        simplex.push((p, f(&p)));
    }

    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let worst = simplex[N].0;
        let mut centroid = [T::zero(); N];
        for v in simplex.iter().take(N) {
            for (ci, vi) in centroid.iter_mut().zip(v.0.iter()) {
                *ci = *ci + *vi;
            }
        }
        for ci in centroid.iter_mut() {
            *ci = *ci / T::of(N as f64);
        }

        let mut reflected = [T::zero(); N];
        for i in 0..N {
            reflected[i] = centroid[i] + alpha * (centroid[i] - worst[i]);
        }
        let fr = f(&reflected);

        if fr < simplex[0].1 {
            let mut expanded = [T::zero(); N];
            for i in 0..N {
                expanded[i] = centroid[i] + gamma * (centroid[i] - worst[i]);
            }
            let fe = f(&expanded);
            simplex[N] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let mut contracted = [T::zero(); N];
            for i in 0..N {
                contracted[i] = centroid[i] + rho * (worst[i] - centroid[i]);
            }
            let fc = f(&contracted);
            if fc < simplex[N].1 {
                simplex[N] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for (vi, bi) in v.0.iter_mut().zip(best.iter()) {
                        *vi = *bi + sigma * (*vi - *bi);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    simplex[0]
}

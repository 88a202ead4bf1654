//! Quadrature building blocks: Gauss-Legendre rules, dyadically graded
//! meshes toward singular endpoints, and an adaptive 1-d integrator used as
//! an independent oracle.

/// Gauss-Legendre nodes and weights on `(-1, 1)`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// A fixed Gauss-Legendre rule with nodes mapped to arbitrary intervals on
/// demand.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        GaussRule { nodes, weights }
    }

    /// Integrate `f` over `[a, b]` with this rule.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Nodes and scaled weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

/// Cells of `[0, 1]` geometrically refined toward the endpoints flagged as
/// singular. With grading ratio `g` and depth `d` the innermost cell has
/// width `g^d`; nodes of a Gauss rule never touch the singular endpoint
/// itself, so integrable endpoint singularities are handled.
pub fn graded_cells(depth: usize, grading: f64, sing_lo: bool, sing_hi: bool) -> Vec<(f64, f64)> {
    assert!(grading > 0.0 && grading < 1.0);
    match (sing_lo, sing_hi) {
        (false, false) => vec![(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)],
        (true, false) => graded_toward_zero(depth, grading, 0.0, 1.0),
        (false, true) => {
            let mut cells: Vec<(f64, f64)> = graded_toward_zero(depth, grading, 0.0, 1.0)
                .into_iter()
                .map(|(a, b)| (1.0 - b, 1.0 - a))
                .collect();
            cells.reverse();
            cells
        }
        (true, true) => {
            let mut cells = graded_toward_zero(depth, grading, 0.0, 0.5);
            let upper: Vec<(f64, f64)> = graded_toward_zero(depth, grading, 0.0, 0.5)
                .into_iter()
                .map(|(a, b)| (1.0 - b, 1.0 - a))
                .collect();
            cells.extend(upper.into_iter().rev());
            cells
        }
    }
}

fn graded_toward_zero(depth: usize, grading: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let width = hi - lo;
    let mut cells = Vec::with_capacity(depth + 1);
    let mut inner = width * grading.powi(depth as i32);
    cells.push((lo, lo + inner));
    for _ in 0..depth {
        let next = inner / grading;
        cells.push((lo + inner, lo + next.min(width)));
        inner = next;
    }
    cells
}

/// Adaptive 1-d quadrature by interval bisection, comparing a 7-point and a
/// 15-point Gauss estimate on each interval. Independent of the tensor
/// machinery in the energy module so the two can cross-validate.
pub fn adaptive_integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: usize,
) -> (f64, f64, u64) {
    let coarse = GaussRule::new(7);
    let fine = GaussRule::new(15);
    let mut total = 0.0;
    let mut err_total = 0.0;
    let mut evals: u64 = 0;
    let mut stack = vec![(a, b, 0usize)];
    // first-pass estimate for the relative tolerance scale
    let rough = fine.integrate(a, b, f).abs();
    evals += 15;
    while let Some((lo, hi, depth)) = stack.pop() {
        let i_coarse = coarse.integrate(lo, hi, f);
        let i_fine = fine.integrate(lo, hi, f);
        evals += 22;
        let err = (i_fine - i_coarse).abs();
        let local_tol = (abs_tol + rel_tol * rough) * (hi - lo) / (b - a);
        // roundoff floor: once the two rules agree to a few ulps of the
        // local integral, subdividing further cannot help, and insisting on
        // an absolute per-width tolerance would subdivide entire subtrees
        // near integrable singularities
        let floor = 32.0 * f64::EPSILON * i_fine.abs();
        if err <= local_tol || err <= floor || depth >= max_depth {
            total += i_fine;
            err_total += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    (total, err_total, evals)
}

use super::sequential::Parameterized;

/// Outcome of comparing analytic gradients against central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// `(tensor, element)` where the worst error occurred.
    pub worst_at: (usize, usize),
    pub worst_analytic: f64,
    pub worst_numeric: f64,
    pub checked: usize,
    pub passed: bool,
}

/// Relative error `|a − n| / max(|a|, |n|, 1e-6)`; the floor keeps gradients
/// that are zero up to round-off from registering as failures.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Perturbs every parameter of `net` by ±`h` and compares `(L(+h) − L(−h)) / 2h`
/// against the supplied analytic gradient, tensor by tensor in
/// [`Parameterized::param_slices_mut`] order. Parameters are restored afterwards.
pub fn grad_check<N, F>(
    net: &mut N,
    analytic: &[Vec<f64>],
    mut loss: F,
    h: f64,
    tol: f64,
) -> GradCheckReport
where
    N: Parameterized,
    F: FnMut(&mut N) -> f64,
{
    let shapes: Vec<usize> = net.param_slices_mut().iter().map(|p| p.len()).collect();
    assert_eq!(shapes.len(), analytic.len(), "gradient tensor count");
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst_at: (0, 0),
        worst_analytic: 0.0,
        worst_numeric: 0.0,
        checked: 0,
        passed: true,
    };
    for (t, &len) in shapes.iter().enumerate() {
        assert_eq!(len, analytic[t].len(), "gradient tensor {t} length");
        for i in 0..len {
            let original = net.param_slices_mut()[t][i];
            net.param_slices_mut()[t][i] = original + h;
            let plus = loss(net);
            net.param_slices_mut()[t][i] = original - h;
            let minus = loss(net);
            net.param_slices_mut()[t][i] = original;

            let numeric = (plus - minus) / (2.0 * h);
            let err = relative_error(analytic[t][i], numeric);
            report.checked += 1;
            if err > report.max_relative_error || err.is_nan() {
                report.max_relative_error = err;
                report.worst_at = (t, i);
                report.worst_analytic = analytic[t][i];
                report.worst_numeric = numeric;
            }
        }
    }
    report.passed = report.max_relative_error <= tol;
    report
}

//! Fixed-step classical Runge–Kutta integration of linear systems
//! ẏ = A·y, with A supplied as a matrix–vector product closure so
//! structured operators (arrowhead, banded) stay O(dim) per stage.

use super::NumericsError;

/// Integrates ẏ = A·y from `y0` at `times[0]` through the ascending
/// grid `times`, returning the state at every grid point (including the
/// first). Each grid interval is subdivided into equal steps no longer
/// than `max_step`, so every grid point is hit exactly.
///
/// `apply` must compute out = A·y for the fixed linear operator A; it
/// is invoked four times per step.
pub fn linear_ode_rk4(
    dim: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    y0: &[f64],
    times: &[f64],
    max_step: f64,
) -> Result<Vec<Vec<f64>>, NumericsError> {
    if times.is_empty() || y0.len() != dim {
        return Err(NumericsError::BadTimeGrid);
    }
    if times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NumericsError::BadTimeGrid);
    }
    if !(max_step > 0.0) {
        return Err(NumericsError::StepTooLarge {
            step: max_step,
            bound: 0.0,
            radius: f64::NAN,
        });
    }

    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(times.len());
    out.push(y.clone());

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];

    for w in times.windows(2) {
        let span = w[1] - w[0];
        let n_sub = (span / max_step).ceil().max(1.0) as usize;
        let h = span / n_sub as f64;
        for _ in 0..n_sub {
            apply(&y, &mut k1);
            for i in 0..dim {
                stage[i] = y[i] + 0.5 * h * k1[i];
            }
            apply(&stage, &mut k2);
            for i in 0..dim {
                stage[i] = y[i] + 0.5 * h * k2[i];
            }
            apply(&stage, &mut k3);
            for i in 0..dim {
                stage[i] = y[i] + h * k3[i];
            }
            apply(&stage, &mut k4);
            let sixth = h / 6.0;
            for i in 0..dim {
                y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(y: &[f64], out: &mut [f64]) {
        out[0] = -y[1];
        out[1] = y[0];
    }

    #[test]
    fn zero_operator_keeps_state() {
        let states = linear_ode_rk4(
            3,
            |_, out| out.iter_mut().for_each(|v| *v = 0.0),
            &[1.0, -2.0, 0.5],
            &[0.0, 1.0, 5.0],
            0.1,
        )
        .unwrap();
        for s in &states {
            assert_eq!(s, &vec![1.0, -2.0, 0.5]);
        }
    }

    #[test]
    fn rotation_radius_drift_below_contract() {
        let period = 2.0 * std::f64::consts::PI;
        let states = linear_ode_rk4(
            2,
            rotation,
            &[1.0, 0.0],
            &[0.0, period],
            period / 1000.0,
        )
        .unwrap();
        let end = &states[1];
        let radius = (end[0] * end[0] + end[1] * end[1]).sqrt();
        assert!((radius - 1.0).abs() < 1e-9, "drift {}", radius - 1.0);
    }

    #[test]
    fn fourth_order_convergence() {
        // Scalar decay ẏ = −y over [0, 1]; halving the step must cut the
        // global error by ~16.
        let exact = (-1.0f64).exp();
        let run = |h: f64| {
            let states =
                linear_ode_rk4(1, |y, out| out[0] = -y[0], &[1.0], &[0.0, 1.0], h).unwrap();
            (states[1][0] - exact).abs()
        };
        let e1 = run(0.1);
        let e2 = run(0.05);
        let ratio = e1 / e2;
        assert!(
            (13.0..=19.0).contains(&ratio),
            "convergence ratio {ratio} (errors {e1:.3e}, {e2:.3e})"
        );
    }

    #[test]
    fn grid_points_are_hit_exactly() {
        let times = [0.0, 0.3, 0.7, 1.0];
        let states = linear_ode_rk4(1, |y, out| out[0] = y[0], &[1.0], &times, 0.01).unwrap();
        assert_eq!(states.len(), times.len());
        for (s, t) in states.iter().zip(times) {
            let exact = t.exp();
            assert!((s[0] - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn descending_grid_is_rejected() {
        assert!(matches!(
            linear_ode_rk4(1, |y, out| out[0] = y[0], &[1.0], &[0.0, 1.0, 0.5], 0.1),
            Err(NumericsError::BadTimeGrid)
        ));
    }
}

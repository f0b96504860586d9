//! Classic fourth-order Runge-Kutta stepping for autonomous systems.

pub(crate) struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(n: usize) -> Self {
        Rk4 {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            stage: vec![0.0; n],
        }
    }

    /// Advance `y` by one step of size `h` for `y' = f(y)`.
    pub(crate) fn step<F>(&mut self, mut f: F, y: &mut [f64], h: f64)
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let n = y.len();
        f(y, &mut self.k1);
        for i in 0..n {
            self.stage[i] = y[i] + 0.5 * h * self.k1[i];
        }
        f(&self.stage, &mut self.k2);
        for i in 0..n {
            self.stage[i] = y[i] + 0.5 * h * self.k2[i];
        }
        f(&self.stage, &mut self.k3);
        for i in 0..n {
            self.stage[i] = y[i] + h * self.k3[i];
        }
        f(&self.stage, &mut self.k4);
        for i in 0..n {
            y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Uniform grid covering `[0, t_end]` with spacing at most `dt`.
pub(crate) fn uniform_steps(t_end: f64, dt: f64) -> (usize, f64) {
    if t_end <= 0.0 {
        return (0, 0.0);
    }
    let n = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (n, t_end / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let err = |h: f64| {
            let (n, h) = uniform_steps(1.0, h);
            let mut y = [1.0];
            let mut rk = Rk4::new(1);
            for _ in 0..n {
                rk.step(|y, dy| dy[0] = -y[0], &mut y, h);
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn grid_hits_end_point() {
        assert_eq!(uniform_steps(20.0, 1e-3).0, 20_000);
        let (n, h) = uniform_steps(1.0, 0.3);
        assert_eq!(n, 4);
        assert!((h * n as f64 - 1.0).abs() < 1e-15);
    }
}

//! Adam optimizer over per-layer parameter arrays.

/// First/second-moment state for one parameter array.
struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    t: u64,
    states: Vec<Moments>,
}

impl Adam {
    pub fn new(lr: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            epsilon,
            t: 0,
            states: Vec::new(),
        }
    }

    /// One update step over every (params, grads) pair, in a stable order.
    /// State slots are allocated on first use and matched by position.
    pub fn step(&mut self, pairs: &mut [(&mut Vec<f64>, &mut Vec<f64>)]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (slot, (params, grads)) in pairs.iter_mut().enumerate() {
            if self.states.len() <= slot {
                self.states.push(Moments {
                    m: vec![0.0; params.len()],
                    v: vec![0.0; params.len()],
                });
            }
            let state = &mut self.states[slot];
            for i in 0..params.len() {
                let g = grads[i];
                state.m[i] = self.beta1 * state.m[i] + (1.0 - self.beta1) * g;
                state.v[i] = self.beta2 * state.v[i] + (1.0 - self.beta2) * g * g;
                let m_hat = state.m[i] / bc1;
                let v_hat = state.v[i] / bc2;
                params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_approximately_signed_lr() {
        // with m_hat = g and v_hat = g^2 at t=1 the update is lr * sign(g)
        let mut adam = Adam::new(0.001, 0.9, 0.999, 1e-8);
        let mut params = vec![1.0, -2.0, 0.5];
        let mut grads = vec![0.3, -0.7, 2.0];
        let before = params.clone();
        adam.step(&mut [(&mut params, &mut grads)]);
        for i in 0..3 {
            let delta = params[i] - before[i];
            let expected = -0.001 * grads[i].signum();
            assert!(
                (delta - expected).abs() < 1e-6,
                "delta {delta} vs {expected}"
            );
        }
    }

    #[test]
    fn constant_gradient_keeps_marching() {
        let mut adam = Adam::new(0.01, 0.9, 0.999, 1e-8);
        let mut params = vec![0.0];
        for _ in 0..100 {
            let mut grads = vec![1.0];
            adam.step(&mut [(&mut params, &mut grads)]);
        }
        assert!(
            params[0] < -0.9,
            "param {} should approach -lr*t",
            params[0]
        );
    }
}

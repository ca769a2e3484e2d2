//! Euclidean projection onto a single-commodity flow polytope
//! `{f : out(i) - in(i) = s_i, 0 <= f <= cap}`.
//!
//! The projection is computed on the dual side. For node potentials `p` the
//! inner minimizer is `f(p) = clip(a + p_tail - p_head, 0, cap)` and the dual
//! is a concave piecewise quadratic with gradient `s - N f(p)`. A damped
//! semismooth Newton method with an exact line search drives that residual
//! to zero.

use nalgebra::{DMatrix, DVector};

const MAX_NEWTON: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct FlowPolytope {
    node_count: usize,
    arcs: Vec<(usize, usize)>,
    supply: Vec<f64>,
    cap: f64,
}

/// A projected flow with the potentials that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub flow: Vec<f64>,
    pub potentials: Vec<f64>,
    /// Largest conservation violation of `flow`.
    pub residual: f64,
    pub newton_steps: usize,
}

impl FlowPolytope {
    /// Polytope for sending `demand` from `source` to `sink` with every arc
    /// capped at `demand`.
    pub fn new(node_count: usize, arcs: Vec<(usize, usize)>, source: usize, sink: usize, demand: f64) -> Self {
        let mut supply = vec![0.0; node_count];
        supply[source] = demand;
        supply[sink] = -demand;
        FlowPolytope {
            node_count,
            arcs,
            supply,
            cap: demand,
        }
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn supply(&self) -> &[f64] {
        &self.supply
    }

    /// Largest conservation violation.
    pub fn residual(&self, flow: &[f64]) -> f64 {
        self.divergence_gap(flow).iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    fn divergence_gap(&self, flow: &[f64]) -> Vec<f64> {
        let mut r = self.supply.clone();
        for (&(t, h), &f) in self.arcs.iter().zip(flow) {
            r[t] -= f;
            r[h] += f;
        }
        r
    }

    fn flow_at(&self, raw: &[f64], p: &[f64]) -> Vec<f64> {
        self.arcs
            .iter()
            .zip(raw)
            .map(|(&(t, h), &a)| (a + p[t] - p[h]).clamp(0.0, self.cap))
            .collect()
    }

    /// Exact maximizer along `dir` of the dual, which is concave piecewise
    /// quadratic in the step with kinks where an arc hits a bound.
    fn line_search(&self, raw: &[f64], p: &[f64], dir: &[f64]) -> f64 {
        let cap = self.cap;
        let lines: Vec<(f64, f64)> = self
            .arcs
            .iter()
            .zip(raw)
            .map(|(&(t, h), &a)| (a + p[t] - p[h], dir[t] - dir[h]))
            .filter(|&(_, b)| b != 0.0)
            .collect();
        let base: f64 = self.supply.iter().zip(dir).map(|(s, d)| s * d).sum();
        let slope = |t: f64| base - lines.iter().map(|&(a, b)| b * (a + b * t).clamp(0.0, cap)).sum::<f64>();
        let at_zero = slope(0.0);
        if at_zero <= 0.0 {
            return 0.0;
        }
        // a full Newton step is exact once the free arcs are settled
        if slope(1.0).abs() <= 1e-12 * at_zero.max(cap) {
            return 1.0;
        }
        // walk the kinks in order, tracking the slope and its derivative
        let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * lines.len());
        let mut rate = 0.0;
        for &(a, b) in &lines {
            let (enter, leave) = ((-a / b).min((cap - a) / b), (-a / b).max((cap - a) / b));
            if enter <= 0.0 && leave > 0.0 {
                rate -= b * b;
            } else if enter > 0.0 {
                events.push((enter, -b * b));
            }
            if leave > 0.0 {
                events.push((leave, b * b));
            }
        }
        events.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
        let (mut t, mut value) = (0.0, at_zero);
        for (at, change) in events {
            let next = value + rate * (at - t);
            if next <= 0.0 {
                return if rate < 0.0 { t - value / rate } else { at };
            }
            t = at;
            value = next;
            rate += change;
        }
        if rate < 0.0 {
            t - value / rate
        } else {
            t.max(1.0)
        }
    }

    /// Projects `raw` starting from potentials `warm` (zeros if `None`).
    ///
    /// Potentials of nodes whose arcs all sit at a bound are not pinned down
    /// and can drift far between calls, so the warm start is only used when
    /// it beats zeros, and a stalled warm run is retried cold.
    pub fn project(&self, raw: &[f64], warm: Option<&[f64]>) -> Projection {
        let cold = vec![0.0; self.node_count];
        let Some(warm) = warm else {
            return self.newton(raw, cold);
        };
        let gap = |p: &[f64]| self.residual(&self.flow_at(raw, p));
        if gap(warm) >= gap(&cold) {
            return self.newton(raw, cold);
        }
        let out = self.newton(raw, warm.to_vec());
        if out.residual <= self.tolerance() {
            return out;
        }
        let retry = self.newton(raw, cold);
        if retry.residual < out.residual {
            retry
        } else {
            out
        }
    }

    fn tolerance(&self) -> f64 {
        1e-12 * self.cap.max(f64::MIN_POSITIVE)
    }

    fn newton(&self, raw: &[f64], mut p: Vec<f64>) -> Projection {
        let n = self.node_count;
        let tol = self.tolerance();
        let mut flow = self.flow_at(raw, &p);
        let mut r = self.divergence_gap(&flow);
        let mut rnorm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut steps = 0;

        while rnorm > tol && steps < MAX_NEWTON {
            steps += 1;
            // (N D N^T + eps I) d = r over arcs strictly inside the box
            let eps = (1e-2 * rnorm).clamp(1e-14, 1e-8);
            let mut m = DMatrix::<f64>::from_diagonal_element(n, n, eps);
            for (&(t, h), &a) in self.arcs.iter().zip(raw) {
                let inner = a + p[t] - p[h];
                if inner > 0.0 && inner < self.cap {
                    m[(t, t)] += 1.0;
                    m[(h, h)] += 1.0;
                    m[(t, h)] -= 1.0;
                    m[(h, t)] -= 1.0;
                }
            }
            let rhs = DVector::from_column_slice(&r);
            let dir = match m.cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => rhs.clone(),
            };
            let t = self.line_search(raw, &p, dir.as_slice());
            if t <= 0.0 {
                break;
            }
            for (q, d) in p.iter_mut().zip(dir.iter()) {
                *q += t * d;
            }
            flow = self.flow_at(raw, &p);
            r = self.divergence_gap(&flow);
            rnorm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        }

        Projection {
            flow,
            potentials: p,
            residual: rnorm,
            newton_steps: steps,
        }
    }
}

/// Projects a raw arc-flow vector of one commodity onto its polytope.
pub fn project_flows(raw: &[f64], polytope: &FlowPolytope) -> Projection {
    polytope.project(raw, None)
}

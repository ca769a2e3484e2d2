//! Dual averaging with extrapolation on the Lagrangian saddle function
//! `phi(u, v) = c·u - v·(A u - b)`, `u` in the box-and-flow set, `v` in the
//! capped sign box.
//!
//! Write `F(u, v) = (c - A^T v, A u - b)` for the monotone operator of `phi`.
//! With unit weights each step keeps the running sum `s` of `-F` at past
//! extrapolated points and does
//!
//! * `x_k = argmax_w <s, w - w_0> - beta/2 * ||w - w_0||^2`
//! * `w_k = argmax_w <-F(x_k), w - x_k> - beta/2 * ||w - x_k||^2`
//! * `s += -F(w_k)`
//!
//! and the averages of `w_k` close the duality gap at rate `1/k` once
//! `beta` bounds the Lipschitz constant of `F`. Norms weight each coordinate
//! by its inverse squared box width, so every coordinate ranges over a unit
//! interval and each argmax reduces to clipping plus one flow projection per
//! commodity. `beta` comes from a power-iteration estimate of the scaled
//! constraint matrix norm.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dual::DualPoint;
use super::layout::Layout;
use super::repair::Incumbents;

const CANDIDATE_EVERY: usize = 10;
use super::subproblem::{constant_term, reduced_costs, refine_dual, routing_value};
use crate::formulation::VarKind;
use crate::par::{self, Execution};

/// Scale of the random initial dual, relative to each cap.
const INITIAL_DUAL_SCALE: f64 = 0.01;
const POWER_ITERATIONS: usize = 50;

/// One logged iteration. Values are running bests, so `gap` never increases.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub dual_value: f64,
    pub primal_value: f64,
    pub gap: f64,
    pub max_residual: f64,
    pub wallclock_ns: u128,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRule {
    /// Multiplier on the estimated Lipschitz constant used as the starting
    /// prox scale. The scale still grows whenever a step overshoots.
    pub theta_scale: f64,
    /// Restart from the averages once the best gap has halved since the
    /// last restart.
    pub restart: bool,
    /// Primal prox scale relative to the dual one.
    pub primal_weight: f64,
    /// Rebalance the primal weight at every restart.
    pub adapt_weight: bool,
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule {
            theta_scale: 0.3,
            restart: true,
            primal_weight: 1.0,
            adapt_weight: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IterationState {
    pub k: usize,
    /// Steps since the last restart.
    pub local_k: usize,
    /// Accumulated reduced costs since the last restart.
    pub s_primal: Vec<f64>,
    /// Accumulated dual ascent directions `b - A u` since the last restart.
    pub s_dual: DualPoint,
    /// Sum of the step weights (all 1).
    pub weight_sum: f64,
    /// Estimated Lipschitz constant of `F` in the scaled norm.
    pub lipschitz: f64,
    /// Prox scale; starts at `theta_scale` times the global estimate and
    /// only grows.
    pub theta: f64,
    pub primal_weight: f64,
    /// Last extrapolated pair.
    pub primal: Vec<f64>,
    pub dual: DualPoint,
    pub primal_avg: Vec<f64>,
    pub dual_avg: DualPoint,
    pub primal_center: Vec<f64>,
    pub dual_center: DualPoint,
    pub potentials: Vec<Vec<f64>>,
    pub restarts: usize,
    gap_at_restart: f64,
    pub incumbents: Incumbents,
    /// [`point_residual`] of the best primal point.
    pub best_residual: f64,
    pub best_dual: f64,
    pub best_dual_point: DualPoint,
    pub best_gap: f64,
    pub trace: Vec<TraceRow>,
    started: Instant,
}

impl IterationState {
    pub fn new(layout: &Layout, seed: u64, rule: StepRule, exec: Execution) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut center = DualPoint::zeros_like(&layout.dual_caps);
        for (block, caps) in center.blocks_mut().into_iter().zip(layout.dual_caps.blocks()) {
            for (v, &cap) in block.iter_mut().zip(caps) {
                *v = INITIAL_DUAL_SCALE * cap * rng.random::<f64>();
            }
        }

        let lipschitz = estimate_lipschitz(layout, exec);
        let mut primal = vec![0.0; layout.index.len()];
        let potentials = vec![vec![0.0; layout.node_count]; layout.commodity_count()];
        let mut state = IterationState {
            k: 0,
            local_k: 0,
            s_primal: vec![0.0; layout.index.len()],
            s_dual: DualPoint::zeros_like(&center),
            weight_sum: 0.0,
            lipschitz,
            theta: rule.theta_scale * lipschitz.max(f64::MIN_POSITIVE),
            primal_weight: rule.primal_weight,
            primal: Vec::new(),
            dual: center.clone(),
            primal_avg: Vec::new(),
            dual_avg: center.clone(),
            primal_center: Vec::new(),
            dual_center: center.clone(),
            potentials,
            restarts: 0,
            gap_at_restart: f64::INFINITY,
            incumbents: Incumbents::default(),
            best_residual: f64::NAN,
            // g(0) = 0: every price is nonnegative at v = 0
            best_dual: 0.0,
            best_dual_point: DualPoint::zeros_like(&center),
            best_gap: f64::INFINITY,
            trace: Vec::new(),
            started: Instant::now(),
        };
        state.project_all(layout, &mut primal, exec);
        state.primal_center = primal.clone();
        state.primal_avg = primal.clone();
        state.primal = primal;
        state
    }

    /// Replaces every flow block of `u` by its projection.
    fn project_all(&mut self, layout: &Layout, u: &mut [f64], exec: Execution) {
        let idx = layout.index;
        let cc = layout.commodity_count();
        let raws: Vec<Vec<f64>> = (0..cc)
            .map(|c| (0..layout.arc_count()).map(|e| u[idx.flow(e, c)]).collect())
            .collect();
        let pots = &self.potentials;
        let projected = par::map_range(exec, cc, |c| layout.polytopes[c].project(&raws[c], Some(&pots[c])));
        for (c, p) in projected.into_iter().enumerate() {
            for (e, f) in p.flow.into_iter().enumerate() {
                u[idx.flow(e, c)] = f;
            }
            self.potentials[c] = p.potentials;
        }
    }

    /// `argmin_u <dir, u> + beta/2 * ||u - center||^2` over the primal set.
    fn primal_step(&mut self, layout: &Layout, center: &[f64], dir: &[f64], exec: Execution) -> Vec<f64> {
        let idx = layout.index;
        let beta = self.theta * self.primal_weight;
        let mut next: Vec<f64> = (0..idx.len())
            .map(|j| {
                let hi = layout.upper[j];
                let raw = center[j] - dir[j] * hi * hi / beta;
                // flows get their box from the polytope projection
                match idx.kind(j) {
                    VarKind::ArcFlow { .. } => raw,
                    _ => raw.clamp(0.0, hi),
                }
            })
            .collect();
        self.project_all(layout, &mut next, exec);
        next
    }

    /// `argmax_v <dir, v> - beta/2 * ||v - center||^2` over the dual box.
    fn dual_step(&self, layout: &Layout, center: &DualPoint, dir: &DualPoint) -> DualPoint {
        let beta = self.theta / self.primal_weight;
        let floor = layout.dual_floor();
        let mut next = center.clone();
        for (((vb, db), cb), lb) in next
            .blocks_mut()
            .into_iter()
            .zip(dir.blocks())
            .zip(layout.dual_caps.blocks())
            .zip(floor.blocks())
        {
            for (((v, &d), &cap), &lo) in vb.iter_mut().zip(db).zip(cb).zip(lb) {
                *v = (*v + d * cap * cap / beta).clamp(lo, cap);
            }
        }
        next
    }

    /// Recenters both prox terms at the running averages and clears the
    /// accumulated directions.
    pub fn restart(&mut self, layout: &Layout, adapt_weight: bool) {
        if adapt_weight {
            // balance the distances both sides travelled since the last restart
            let du = scaled_distance(&self.primal_avg, &self.primal_center, &layout.upper);
            let caps: Vec<f64> = layout.dual_caps.iter().collect();
            let a: Vec<f64> = self.dual_avg.iter().collect();
            let b: Vec<f64> = self.dual_center.iter().collect();
            let dv = scaled_distance(&a, &b, &caps);
            if du > 1e-10 && dv > 1e-10 {
                self.primal_weight = (0.5 * (dv / du).ln() + 0.5 * self.primal_weight.ln()).exp();
            }
        }
        self.primal_center = self.primal_avg.clone();
        self.dual_center = self.dual_avg.clone();
        self.s_primal.iter_mut().for_each(|s| *s = 0.0);
        self.s_dual = DualPoint::zeros_like(&self.dual_center);
        self.local_k = 0;
        self.restarts += 1;
        self.gap_at_restart = self.best_gap;
    }

    /// `||F(w) - F(x)||_* / ||w - x||` in the weighted norms.
    fn local_lipschitz(
        &self,
        layout: &Layout,
        u: (&[f64], &[f64]),
        v: (&DualPoint, &DualPoint),
        d: (&[f64], &[f64]),
        slack: (&DualPoint, &DualPoint),
    ) -> f64 {
        let w = self.primal_weight;
        let caps: Vec<f64> = layout.dual_caps.iter().collect();
        let mut step = 0.0;
        let mut change = 0.0;
        for j in 0..u.0.len() {
            let hi = layout.upper[j];
            if hi > 0.0 {
                step += w * ((u.1[j] - u.0[j]) / hi).powi(2);
                change += ((d.1[j] - d.0[j]) * hi).powi(2) / w;
            }
        }
        let pairs = v.0.iter().zip(v.1.iter()).zip(slack.0.iter().zip(slack.1.iter())).zip(&caps);
        for (((a, b), (s0, s1)), &cap) in pairs {
            if cap > 0.0 {
                step += ((b - a) / cap).powi(2) / w;
                change += w * ((s1 - s0) * cap).powi(2);
            }
        }
        if step > 0.0 {
            (change / step).sqrt()
        } else {
            0.0
        }
    }

    pub fn best_primal_value(&self) -> f64 {
        self.incumbents.best_value()
    }
}

/// `a·u - b` on every dualized row.
pub fn row_slacks(layout: &Layout, u: &[f64]) -> DualPoint {
    let idx = layout.index;
    let cc = layout.commodity_count();
    let mut s = DualPoint::zeros_like(&layout.dual_caps);
    for h in 0..idx.hyperarcs {
        for (m, cs) in layout.session_commodities.iter().enumerate() {
            for &c in cs {
                s.lambda[h * cc + c] = u[idx.y(h, m)] - u[idx.x(h, c)];
            }
        }
        let ysum: f64 = (0..idx.sessions).map(|m| u[idx.y(h, m)]).sum();
        s.nu[h] = u[idx.z(h)] - ysum;
        let info = &layout.hyperarcs[h];
        s.mu[h] = (info.gamma * u[idx.power(h)] - u[idx.z(h)]) / info.scale;
    }
    for (g, (owners, arcs)) in layout.groups.iter().enumerate() {
        for c in 0..cc {
            let xs: f64 = owners.iter().map(|&h| u[idx.x(h, c)]).sum();
            let fs: f64 = arcs.iter().map(|&e| u[idx.flow(e, c)]).sum();
            s.pi[g * cc + c] = xs - fs;
        }
    }
    for i in 0..layout.node_count {
        if layout.has_budget[i] {
            s.zeta[i] = 1.0;
        }
    }
    for (h, info) in layout.hyperarcs.iter().enumerate() {
        s.zeta[info.sender] -= u[idx.power(h)] / info.budget;
    }
    s
}

/// Largest violation of any row (conservation included) or box.
pub fn point_residual(layout: &Layout, u: &[f64]) -> f64 {
    let idx = layout.index;
    let s = row_slacks(layout, u);
    let mut worst = s.nu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for b in [&s.lambda, &s.pi, &s.mu, &s.zeta] {
        worst = b.iter().fold(worst, |m, x| m.max(-x));
    }
    for (c, poly) in layout.polytopes.iter().enumerate() {
        let f: Vec<f64> = (0..layout.arc_count()).map(|e| u[idx.flow(e, c)]).collect();
        worst = worst.max(poly.residual(&f));
    }
    u.iter().fold(worst, |m, x| m.max(-x))
}

/// Dual function value given the reduced costs `d` at `dual`.
pub fn value_from_reduced(layout: &Layout, dual: &DualPoint, d: &[f64], exec: Execution) -> f64 {
    let idx = layout.index;
    let boxes: f64 = (0..idx.len())
        .filter(|&j| !matches!(idx.kind(j), VarKind::ArcFlow { .. }))
        .map(|j| d[j].min(0.0) * layout.upper[j])
        .sum();
    let routing: f64 = par::map_range(exec, layout.commodity_count(), |c| {
        let prices: Vec<f64> = (0..layout.arc_count()).map(|e| d[idx.flow(e, c)]).collect();
        routing_value(layout, c, &prices)
    })
    .iter()
    .sum();
    constant_term(layout, dual) + boxes + routing
}

/// Accumulates one direction with unit weight.
pub fn accumulate(sum: &mut [f64], g: &[f64]) {
    for (s, x) in sum.iter_mut().zip(g) {
        *s += x;
    }
}

/// Power iteration for the spectral norm of `diag(cap) A diag(hi)`, the
/// Lipschitz constant of `F` in the scaled norms.
pub fn estimate_lipschitz(layout: &Layout, exec: Execution) -> f64 {
    let n = layout.index.len();
    let zero_slack = row_slacks(layout, &vec![0.0; n]);
    let zero_dual = DualPoint::zeros_like(&layout.dual_caps);
    let base_cost = reduced_costs(layout, &zero_dual, exec);
    let caps: Vec<f64> = layout.dual_caps.iter().collect();

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut norm = 0.0;
    for _ in 0..POWER_ITERATIONS {
        // y = cap * A (hi * x)
        let scaled: Vec<f64> = x.iter().zip(&layout.upper).map(|(a, h)| a * h).collect();
        let s = row_slacks(layout, &scaled);
        let y: Vec<f64> = s.iter().zip(zero_slack.iter()).zip(&caps).map(|((a, b), c)| (a - b) * c).collect();
        // x = hi * A^T (cap * y)
        let mut v = DualPoint::zeros_like(&layout.dual_caps);
        let mut it = y.iter().zip(&caps).map(|(a, c)| a * c);
        for b in v.blocks_mut() {
            for slot in b.iter_mut() {
                *slot = it.next().unwrap_or(0.0);
            }
        }
        let d = reduced_costs(layout, &v, exec);
        let back: Vec<f64> = base_cost.iter().zip(&d).zip(&layout.upper).map(|((c, r), h)| (c - r) * h).collect();
        let len = back.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len == 0.0 {
            return 0.0;
        }
        norm = len.sqrt();
        x = back.into_iter().map(|a| a / len).collect();
    }
    norm
}

/// `(primal - dual) / dual`. Normalizing by the lower bound makes
/// `gap <= tol` certify that `primal` is within `tol` of the optimum.
/// While the bound is not yet positive the primal is used instead, which
/// gives a value of at least 1.
pub fn relative_gap(primal: f64, dual: f64) -> f64 {
    let diff = primal - dual;
    if !primal.is_finite() {
        f64::INFINITY
    } else if diff <= 0.0 {
        0.0
    } else if dual > 0.0 {
        diff / dual
    } else {
        diff / primal.abs().max(1e-12)
    }
}

fn scaled_distance(a: &[f64], b: &[f64], width: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(width)
        .filter(|(_, &w)| w > 0.0)
        .map(|((x, y), w)| ((x - y) / w).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn negated(d: &DualPoint) -> DualPoint {
    let mut out = d.clone();
    for b in out.blocks_mut() {
        b.iter_mut().for_each(|x| *x = -*x);
    }
    out
}

/// One extrapolated dual-averaging step: moves to a new pair, folds it into
/// the averages and updates the running bests.
pub fn iterate(state: &mut IterationState, layout: &Layout, rule: StepRule, exec: Execution) {
    // prediction from the aggregated directions
    let center_u = state.primal_center.clone();
    let center_v = state.dual_center.clone();
    let s_u = state.s_primal.clone();
    let s_v = state.s_dual.clone();
    let x_u = state.primal_step(layout, &center_u, &s_u, exec);
    let x_v = state.dual_step(layout, &center_v, &s_v);

    // extrapolation from the prediction
    let d_x = reduced_costs(layout, &x_v, exec);
    let slack_x = row_slacks(layout, &x_u);
    let w_u = state.primal_step(layout, &x_u, &d_x, exec);
    let w_v = state.dual_step(layout, &x_v, &negated(&slack_x));

    let d_w = reduced_costs(layout, &w_v, exec);
    let slack_w = row_slacks(layout, &w_u);

    // raise theta when the step overshoots the local Lipschitz ratio
    let local = state.local_lipschitz(layout, (&x_u, &w_u), (&x_v, &w_v), (&d_x, &d_w), (&slack_x, &slack_w));
    if local > state.theta {
        state.theta = local;
    }
    accumulate(&mut state.s_primal, &d_w);
    for (sb, gb) in state.s_dual.blocks_mut().into_iter().zip(slack_w.blocks()) {
        for (s, g) in sb.iter_mut().zip(gb) {
            *s -= g;
        }
    }

    let k1 = (state.local_k + 1) as f64;
    for (a, &u) in state.primal_avg.iter_mut().zip(&w_u) {
        *a = if state.local_k == 0 { u } else { *a + (u - *a) / k1 };
    }
    for (ab, vb) in state.dual_avg.blocks_mut().into_iter().zip(w_v.blocks()) {
        for (a, &v) in ab.iter_mut().zip(vb) {
            *a = if state.local_k == 0 { v } else { *a + (v - *a) / k1 };
        }
    }
    state.primal = w_u;
    state.dual = w_v;
    state.k += 1;
    state.local_k += 1;
    state.weight_sum += 1.0;

    // candidates are costly to score so only every few steps
    let due = state.k.is_multiple_of(CANDIDATE_EVERY) || state.incumbents.best.is_none();
    let duals = if due { vec![refine_dual(layout, &state.dual), refine_dual(layout, &state.dual_avg)] } else { Vec::new() };
    for cand in duals {
        let d = reduced_costs(layout, &cand, exec);
        let value = value_from_reduced(layout, &cand, &d, exec);
        if value > state.best_dual {
            state.best_dual = value;
            state.best_dual_point = cand;
        }
    }

    for flows in [&state.primal_avg, &state.primal].into_iter().filter(|_| due) {
        if state.incumbents.offer(layout, flows) {
            let best = state.incumbents.best.as_ref().map(|r| &r.point);
            state.best_residual = best.map_or(f64::NAN, |u| point_residual(layout, u));
        }
    }

    let primal_value = state.best_primal_value();
    let gap = relative_gap(primal_value, state.best_dual).min(state.best_gap);
    state.best_gap = gap;

    if rule.restart && gap.is_finite() && gap <= 0.5 * state.gap_at_restart {
        state.restart(layout, rule.adapt_weight);
    }

    state.trace.push(TraceRow {
        iter: state.k,
        dual_value: state.best_dual,
        primal_value,
        gap,
        max_residual: state.best_residual,
        wallclock_ns: state.started.elapsed().as_nanos(),
    });
}

//! Turns arc flows into a full feasible point.
//!
//! For a sender with nested hyperarcs `h_1 ⊂ ... ⊂ h_K`, let `D_k(c)` be the
//! flow of commodity `c` on arcs to receivers outside `h_(k-1)`. Rows
//! require `sum_{j>=k} x[h_j][c] >= D_k(c)`. Since gains shrink along the
//! chain, the cheapest rates put each session's `max_c D_k(c) - max_c
//! D_(k+1)(c)` on `h_k`; `x = y` then satisfies every arc-sum and coding row,
//! and `z`, `P` follow directly.

use super::layout::Layout;

const BISECTION_STEPS: usize = 30;

/// A full point built from flows. `point` holds the given flows unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct Repaired {
    pub point: Vec<f64>,
    pub objective: f64,
    /// Power used per node.
    pub usage: Vec<f64>,
    pub within_budget: bool,
    /// Smallest relative budget slack `1 - usage / budget` over senders.
    pub slack: f64,
}

/// Builds the cheapest `x, y, z, P` consistent with the flow block of `u`.
pub fn repair(layout: &Layout, u: &[f64]) -> Repaired {
    let idx = layout.index;
    let cc = layout.commodity_count();
    let sessions = layout.session_demands.len();
    let mut point = u.to_vec();
    let mut usage = vec![0.0; layout.node_count];
    let mut suffix = vec![0.0; cc];
    let mut next_max = vec![0.0; sessions];

    for chain in &layout.chains {
        suffix.iter_mut().for_each(|s| *s = 0.0);
        next_max.iter_mut().for_each(|s| *s = 0.0);
        for k in (0..chain.hyperarcs.len()).rev() {
            let h = chain.hyperarcs[k];
            for &e in &chain.new_arcs[k] {
                for (c, s) in suffix.iter_mut().enumerate() {
                    *s += u[idx.flow(e, c)];
                }
            }
            let mut z = 0.0;
            for (m, cs) in layout.session_commodities.iter().enumerate() {
                let here = cs.iter().map(|&c| suffix[c]).fold(0.0, f64::max);
                let y = here - next_max[m];
                next_max[m] = here;
                point[idx.y(h, m)] = y;
                for &c in cs {
                    point[idx.x(h, c)] = y;
                }
                z += y;
            }
            let info = &layout.hyperarcs[h];
            let p = z / info.gamma;
            point[idx.z(h)] = z;
            point[idx.power(h)] = p;
            usage[info.sender] += p;
        }
    }

    let objective = (0..idx.hyperarcs).map(|h| point[idx.power(h)]).sum();
    let within_budget = usage.iter().zip(&layout.budgets).all(|(u, b)| u <= b);
    let slack = (0..layout.node_count)
        .filter(|&i| layout.has_budget[i])
        .map(|i| 1.0 - usage[i] / layout.budgets[i])
        .fold(f64::INFINITY, f64::min);
    Repaired {
        point,
        objective,
        usage,
        within_budget,
        slack,
    }
}

/// Moves `candidate` flows toward the within-budget `anchor` flows just far
/// enough to respect every budget. Returns the largest feasible blend found
/// by bisection, or `None` if even a tiny step is over budget.
pub fn blend_into_budget(layout: &Layout, anchor: &[f64], candidate: &[f64]) -> Option<Repaired> {
    let full = repair(layout, candidate);
    if full.within_budget {
        return Some(full);
    }
    blend_toward(layout, anchor, candidate)
}

fn blend_toward(layout: &Layout, anchor: &[f64], candidate: &[f64]) -> Option<Repaired> {
    let mix = |t: f64| -> Vec<f64> { anchor.iter().zip(candidate).map(|(a, b)| a + t * (b - a)).collect() };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = None;
    for _ in 0..BISECTION_STEPS {
        let t = 0.5 * (lo + hi);
        let r = repair(layout, &mix(t));
        if r.within_budget {
            lo = t;
            best = Some(r);
        } else {
            hi = t;
        }
    }
    best
}

/// Feasible points kept for repairing over-budget candidates: the cheapest
/// one and the one with the most budget slack. Blending toward the cheapest
/// alone stalls once it sits on a budget, since then every small violation
/// forces a step of nearly zero.
#[derive(Clone, Debug, Default)]
pub struct Incumbents {
    pub best: Option<Repaired>,
    pub roomiest: Option<Repaired>,
}

impl Incumbents {
    pub fn best_value(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |r| r.objective)
    }

    /// Repairs `flows`, pulling them into the budgets if needed. Returns
    /// true when the cheapest point improved.
    pub fn offer(&mut self, layout: &Layout, flows: &[f64]) -> bool {
        let full = repair(layout, flows);
        let mut found = Vec::new();
        if full.within_budget {
            found.push(full);
        } else {
            for anchor in [&self.best, &self.roomiest].into_iter().flatten() {
                found.extend(blend_toward(layout, &anchor.point, flows));
            }
        }
        let mut improved = false;
        for r in found {
            if self.roomiest.as_ref().is_none_or(|a| r.slack > a.slack) {
                self.roomiest = Some(r.clone());
            }
            if r.objective < self.best_value() {
                self.best = Some(r);
                improved = true;
            }
        }
        improved
    }
}

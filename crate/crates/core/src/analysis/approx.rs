use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{NetworkInstance, NodeId};

/// Largest SNR per degree of freedom still treated as low-SNR. The linear
/// rate then overstates the true capacity by at most about half a percent.
pub const REGIME_THRESHOLD: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproximationRow {
    /// `P / (W D^alpha N0)`.
    pub snr_per_dof: f64,
    /// `W ln(1 + x)`.
    pub exact_rate: f64,
    /// `P / (D^alpha N0)`.
    pub linear_rate: f64,
    /// `(linear - exact) / linear`.
    pub relative_error: f64,
    pub out_of_regime: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub rows: Vec<ApproximationRow>,
    pub max_relative_error: f64,
    pub regime_threshold: f64,
}

impl ApproximationReport {
    pub fn new(rows: Vec<ApproximationRow>) -> Self {
        let max_relative_error = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
        ApproximationReport {
            rows,
            max_relative_error,
            regime_threshold: REGIME_THRESHOLD,
        }
    }
}

/// Error of replacing the point-to-point capacity by its linear limit.
pub fn linearity_error(power: f64, distance: f64, alpha: f64, noise_density: f64, bandwidth: f64) -> ApproximationRow {
    let linear_rate = power / (distance.powf(alpha) * noise_density);
    let x = linear_rate / bandwidth;
    let exact_rate = bandwidth * x.ln_1p();
    ApproximationRow {
        snr_per_dof: x,
        exact_rate,
        linear_rate,
        relative_error: relative_excess(linear_rate, exact_rate),
        out_of_regime: x > REGIME_THRESHOLD,
    }
}

/// [`linearity_error`] at unit distance, noise and bandwidth for each `x`.
pub fn linearity_sweep(snr_per_dof: &[f64]) -> ApproximationReport {
    ApproximationReport::new(snr_per_dof.iter().map(|&x| linearity_error(x, 1.0, 2.0, 1.0, 1.0)).collect())
}

/// `(approx - exact) / approx`, zero when both vanish.
fn relative_excess(approx: f64, exact: f64) -> f64 {
    if approx == 0.0 {
        0.0
    } else {
        (approx - exact) / approx
    }
}

/// Rate of one transmitter at a common receiver, with and without the other
/// transmitters' interference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterferenceRow {
    pub transmitter: u32,
    pub receiver: u32,
    /// Signal to interference and noise ratio at the receiver.
    pub sinr: f64,
    /// Interference-free SNR per degree of freedom.
    pub snr_per_dof: f64,
    /// `W ln(1 + sinr)`.
    pub rate_exact: f64,
    /// Interference dropped: `W ln(1 + snr)`.
    pub rate_no_interference: f64,
    /// Interference dropped and capacity linearized.
    pub rate_linear: f64,
    /// Relative error of dropping interference.
    pub step_one_error: f64,
    /// Relative error of then linearizing.
    pub step_two_error: f64,
    pub out_of_regime: bool,
}

/// One row per transmitter in `transmitters`, each sending to `receiver`
/// with every power the node's full budget.
///
/// The interference sum divides each interferer's received power by `N0`
/// before the outer `W N0` noise factor, so it is not in power units. It is
/// kept that way on purpose; reports carry a note about it.
pub fn interference_error(
    instance: &NetworkInstance,
    transmitters: &[NodeId],
    receiver: NodeId,
) -> Result<Vec<InterferenceRow>> {
    if transmitters.is_empty() {
        return Err(Error::validation("transmitters", "need at least one transmitter"));
    }
    if transmitters.contains(&receiver) {
        return Err(Error::validation("receiver", format!("node {receiver} cannot also transmit")));
    }
    let rx = instance.node(receiver).ok_or(Error::UnknownNode(receiver))?;
    let received = |id: NodeId| -> Result<f64> {
        let tx = instance.node(id).ok_or(Error::UnknownNode(id))?;
        Ok(tx.power_budget / tx.location.distance(&rx.location).powf(instance.alpha()))
    };
    let powers = transmitters.iter().map(|&t| received(t)).collect::<Result<Vec<_>>>()?;
    let (w, n0) = (instance.bandwidth(), instance.noise_density());

    let rows = transmitters
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let interference: f64 = powers.iter().enumerate().filter(|&(v, _)| v != k).map(|(_, p)| p / n0).sum();
            let sinr = powers[k] / (w * (n0 + interference));
            let snr = powers[k] / (w * n0);
            let rate_exact = w * sinr.ln_1p();
            let rate_no_interference = w * snr.ln_1p();
            let rate_linear = w * snr;
            InterferenceRow {
                transmitter: t.0,
                receiver: receiver.0,
                sinr,
                snr_per_dof: snr,
                rate_exact,
                rate_no_interference,
                rate_linear,
                step_one_error: relative_excess(rate_no_interference, rate_exact),
                step_two_error: relative_excess(rate_linear, rate_no_interference),
                out_of_regime: snr > REGIME_THRESHOLD,
            }
        })
        .collect();
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Solver(format!("writing csv: {e}"))
}

pub fn write_approximation_csv<W: Write>(out: W, report: &ApproximationReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Solver(format!("writing csv: {e}")))
}

/// Writes rows as CSV after `#` comment lines describing the interference
/// model.
pub fn write_interference_csv<W: Write>(mut out: W, rows: &[InterferenceRow]) -> Result<()> {
    let io = |e: std::io::Error| Error::Solver(format!("writing csv: {e}"));
    writeln!(out, "# sinr = (P_i / d_ij^alpha) / (W (N0 + sum_v P_v / (d_vj^alpha N0)))").map_err(io)?;
    writeln!(out, "# the interference sum is divided by N0 as written in the model; this is not dimensionally").map_err(io)?;
    writeln!(out, "# consistent with the outer W N0 factor and overstates interference when N0 < 1").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Solver(format!("writing csv: {e}")))
}

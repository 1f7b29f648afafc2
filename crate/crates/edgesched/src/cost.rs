//! Per-layer delay and energy primitives: local execution cost, the CPU
//! power model, the Shannon uplink rate, and remote offloading costs.
//!
//! A task needs `cycles` CPU cycles and carries `input_size` bits uplink.
//! Local execution takes `cycles / f` seconds. Offloading to a server
//! behind a wireless link with rate `r = B·log2(1 + P_tr·h / N0)` takes
//!
//! ```text
//! delay  = s / r + cycles / f_server + feedback + extra_rtt
//! energy = P_tr · (s / r) + P_id · (cycles / f_server)
//! ```
//!
//! so the device pays transmit power while uploading and idle power while
//! waiting for the server to compute; feedback time costs no energy. Edge
//! and cloud servers use the same formulas and differ only in parameters.

use thiserror::Error;

use crate::model::{Layer, Link, LocalPower, Node, NodeId, SystemParams, Task};

/// Errors from cost evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("cycles must be non-negative, got {0}")]
    NegativeCycles(f64),
    #[error("kappa must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("gamma must lie in [2, 3], got {0}")]
    GammaOutOfRange(f64),
    #[error("node {node} is at the wrong layer for this operation")]
    WrongLayer { node: NodeId },
    #[error("link ends at {link_to}, not at server {server}")]
    LinkMismatch { link_to: NodeId, server: NodeId },
}

/// Additive components of a layer's delay.
///
/// `delay = uplink_time + exec_time + feedback_time`; local execution has
/// `uplink_time = 0`. `feedback_time` absorbs both the constant feedback
/// term and any fixed propagation (`extra_rtt`) configured on the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub uplink_time: f64,
    pub exec_time: f64,
    pub feedback_time: f64,
}

/// Delay and device-side energy of executing one task at one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerCosts {
    /// End-to-end task duration in seconds.
    pub delay: f64,
    /// Energy drawn from the device in joules.
    pub energy: f64,
    pub breakdown: CostBreakdown,
}

/// Time to run `cycles` CPU cycles at `frequency` Hz: `cycles / f`.
pub fn local_delay(cycles: f64, frequency: f64) -> Result<f64, CostError> {
    if frequency <= 0.0 {
        return Err(CostError::NonPositiveFrequency(frequency));
    }
    if cycles < 0.0 {
        return Err(CostError::NegativeCycles(cycles));
    }
    Ok(cycles / frequency)
}

/// Dynamic CPU power `P = κ·f^γ` in watts.
///
/// Consistency: `cpu_power(f, κ, γ) · local_delay(w, f)` equals the
/// analytic-mode [`local_energy`] up to floating-point association.
pub fn cpu_power(frequency: f64, kappa: f64, gamma: f64) -> Result<f64, CostError> {
    if frequency <= 0.0 {
        return Err(CostError::NonPositiveFrequency(frequency));
    }
    if kappa <= 0.0 {
        return Err(CostError::NonPositiveKappa(kappa));
    }
    if !(2.0..=3.0).contains(&gamma) {
        return Err(CostError::GammaOutOfRange(gamma));
    }
    Ok(kappa * frequency.powf(gamma))
}

/// Device energy for local execution of `cycles` cycles on a local node.
///
/// Measured mode charges the measured execution power over the run time,
/// `P_loc · (cycles / f)`. Analytic mode uses the CPU power model and
/// reduces to `κ·f^(γ−1)·cycles`.
pub fn local_energy(cycles: f64, node: &Node) -> Result<f64, CostError> {
    if cycles < 0.0 {
        return Err(CostError::NegativeCycles(cycles));
    }
    let power = match (node.layer, &node.local_power) {
        (Layer::Local, Some(p)) => p,
        _ => {
            return Err(CostError::WrongLayer {
                node: node.id.clone(),
            })
        }
    };
    if node.frequency <= 0.0 {
        return Err(CostError::NonPositiveFrequency(node.frequency));
    }
    match *power {
        LocalPower::Measured { power } => Ok(power * (cycles / node.frequency)),
        LocalPower::Analytic { kappa, gamma } => {
            if kappa <= 0.0 {
                return Err(CostError::NonPositiveKappa(kappa));
            }
            if !(2.0..=3.0).contains(&gamma) {
                return Err(CostError::GammaOutOfRange(gamma));
            }
            Ok(kappa * node.frequency.powf(gamma - 1.0) * cycles)
        }
    }
}

/// Uplink rate of a device-to-server link: `B·log2(1 + P_tr·h / N0)` bit/s.
pub fn uplink_rate(link: &Link) -> f64 {
    link.bandwidth * (1.0 + link.tx_power * link.gain / link.noise).log2()
}

/// Full cost of executing `task` locally on `node`.
pub fn local_costs(task: &Task, node: &Node) -> Result<LayerCosts, CostError> {
    let exec_time = local_delay(task.cycles, node.frequency)?;
    let energy = local_energy(task.cycles, node)?;
    Ok(LayerCosts {
        delay: exec_time,
        energy,
        breakdown: CostBreakdown {
            uplink_time: 0.0,
            exec_time,
            feedback_time: 0.0,
        },
    })
}

fn check_remote(link: &Link, server: &Node) -> Result<(), CostError> {
    if server.layer == Layer::Local {
        return Err(CostError::WrongLayer {
            node: server.id.clone(),
        });
    }
    if link.to_node != server.id {
        return Err(CostError::LinkMismatch {
            link_to: link.to_node.clone(),
            server: server.id.clone(),
        });
    }
    Ok(())
}

/// Full cost of offloading `task` over `link` to an edge or cloud server.
///
/// `delay = s/r + cycles/f_server + feedback_time + extra_rtt`, with the
/// breakdown populated; the energy field matches [`remote_energy`].
pub fn remote_delay(
    task: &Task,
    link: &Link,
    server: &Node,
    system: &SystemParams,
) -> Result<LayerCosts, CostError> {
    check_remote(link, server)?;
    let uplink_time = uplink_time(task, link)?;
    let exec_time = local_delay(task.cycles, server.frequency)?;
    let feedback_time = system.feedback_time + link.extra_rtt;
    Ok(LayerCosts {
        delay: uplink_time + exec_time + feedback_time,
        energy: link.tx_power * uplink_time + link.idle_power * exec_time,
        breakdown: CostBreakdown {
            uplink_time,
            exec_time,
            feedback_time,
        },
    })
}

/// Device energy for offloading: `P_tr·(s/r) + P_id·(cycles/f_server)`.
///
/// Feedback time and extra RTT draw no energy.
pub fn remote_energy(task: &Task, link: &Link, server: &Node) -> Result<f64, CostError> {
    check_remote(link, server)?;
    let uplink_time = uplink_time(task, link)?;
    let exec_time = local_delay(task.cycles, server.frequency)?;
    Ok(link.tx_power * uplink_time + link.idle_power * exec_time)
}

fn uplink_time(task: &Task, link: &Link) -> Result<f64, CostError> {
    if task.input_size < 0.0 {
        return Err(CostError::NegativeCycles(task.input_size));
    }
    Ok(task.input_size / uplink_rate(link))
}

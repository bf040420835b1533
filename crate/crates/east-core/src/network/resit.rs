//! Doubling step for effective resistances, with a certified flow.

use serde::Serialize;

use crate::bottleneck::block_ladder;
use crate::error::{Error, Result};
use crate::exact::StateSet;
use crate::Params;

use super::capacity::capacity_of;
use super::equilibrium::equilibrium_of;
use super::net::b_ell;
use super::{caps, flow_energy, Flow, Network};

/// A certified unit flow from the all ones state to the anchored set of the
/// next ladder length, glued from equilibrium flows of the current length.
///
/// For each of the `overlap` anchor offsets the construction superposes
/// three copies of an equilibrium flow: the flow itself, its mirror through
/// the anchored vacancy (same edges inside the sink slab, opposite sign),
/// and a translate that restarts the complementary flow to the right of the
/// vacancy. Divergences of the intermediate sinks cancel and the average
/// over offsets is again a unit flow, whose energy bounds the next
/// resistance by Thomson's principle. All checks are enforced before the
/// certificate is returned.
#[derive(Clone, Debug, Serialize)]
pub struct ResitCertificate {
    pub len_from: usize,
    pub len_to: usize,
    /// Number of anchor offsets averaged over.
    pub overlap: usize,
    #[serde(skip)]
    pub theta: Flow,
    /// Divergence at the all ones state.
    pub strength: f64,
    /// Largest absolute divergence away from source and sink.
    pub divergence_residual: f64,
    /// Largest positive divergence on the sink.
    pub sink_violation: f64,
    pub energy: f64,
    /// Effective resistance to the anchored set at the current length.
    pub r_prev: f64,
    /// Effective resistance to the anchored set at the next length.
    pub r_next: f64,
    /// `(4 + 6 / (q * overlap)) * r_prev`.
    pub bound: f64,
    pub slack: f64,
}

pub fn resit_construction(i: usize, r: usize, q: f64) -> Result<ResitCertificate> {
    if i == 0 {
        return Err(Error::InvalidArgument(
            "recursion steps start at 1".into(),
        ));
    }
    let ladder = block_ladder(r, q)?;
    let lengths = ladder.lengths();
    if i + 1 > lengths.len() {
        return Err(Error::InvalidArgument(format!(
            "step {i} needs rung {} of a ladder with only {} rungs",
            i + 1,
            lengths.len()
        )));
    }
    let len_from = lengths[i - 1];
    let len_to = lengths[i];
    if len_to > caps::RESIT {
        return Err(Error::LengthCap {
            op: "recursion flow assembly",
            cap: caps::RESIT,
            len: len_to,
        });
    }
    let overlap = len_from.div_ceil(r);
    debug_assert_eq!(len_to, 2 * len_from - overlap);

    let params = Params::new_wide(len_to, q)?;
    let net = Network::build(&params)?;
    let one = StateSet::singleton(net.n(), net.n() - 1);
    let anchor = |j: usize| len_from - overlap + j;

    let mut copies = Vec::with_capacity(overlap + 1);
    for j in 0..=overlap {
        copies.push(equilibrium_of(&net, &one, &b_ell(len_to, anchor(j))?)?);
    }

    let weight = 1.0 / overlap as f64;
    let mut theta = Flow::new(len_to);
    for j in 1..=overlap {
        let pivot = anchor(j);
        theta = theta.plus(&copies[j].scaled(weight))?;
        theta = theta.plus(&mirrored_into_sink(&copies[j], len_to, pivot).scaled(weight))?;
        theta = theta.plus(&shifted_onto_tail(&copies[overlap - j], len_to, pivot).scaled(weight))?;
    }

    let divs = theta.divergences();
    let one_id = net.n() - 1;
    let sink = b_ell(len_to, len_to)?;
    let strength = divs[one_id];
    let mut divergence_residual = 0.0f64;
    let mut sink_violation = 0.0f64;
    for (id, &d) in divs.iter().enumerate() {
        if id == one_id {
            continue;
        }
        if sink.contains(id) {
            sink_violation = sink_violation.max(d);
        } else {
            divergence_residual = divergence_residual.max(d.abs());
        }
    }

    let energy = flow_energy(&net, &theta)?;
    let r_prev = 1.0 / capacity_of(&net, &one, &b_ell(len_to, len_from)?)?.value;
    let r_next = 1.0 / capacity_of(&net, &one, &sink)?.value;
    let bound = (4.0 + 6.0 / (q * overlap as f64)) * r_prev;
    let slack = bound - energy;

    let checks = [
        ("unit strength at the all ones source", (strength - 1.0).abs(), 1e-12),
        ("zero divergence off the source and sink", divergence_residual, 1e-12),
        ("inflow at the sink", sink_violation, 1e-12),
        (
            "the flow energy dominates the next resistance",
            (r_next - energy).max(0.0),
            1e-9 * energy,
        ),
        (
            "the doubling bound dominates the flow energy",
            (energy - bound).max(0.0),
            1e-9 * bound,
        ),
    ];
    for (what, magnitude, tol) in checks {
        if magnitude > tol {
            return Err(Error::CertificateFailed { what, magnitude });
        }
    }

    Ok(ResitCertificate {
        len_from,
        len_to,
        overlap,
        theta,
        strength,
        divergence_residual,
        sink_violation,
        energy,
        r_prev,
        r_next,
        bound,
        slack,
    })
}

/// Image of a flow under clearing the anchored spin: edges whose endpoints
/// both carry ones at and right of `ell` reappear between the corresponding
/// sink states, with the orientation reversed.
fn mirrored_into_sink(flow: &Flow, len: usize, ell: usize) -> Flow {
    let all = (1usize << len) - 1;
    let high = all & !((1usize << (ell - 1)) - 1);
    let bit = 1usize << (ell - 1);
    let mut out = Flow::new(len);
    for (a, b, v) in flow.iter() {
        if a & high == high && b & high == high {
            out.set(a ^ bit, b ^ bit, -v).unwrap();
        }
    }
    out
}

/// Translate of a flow past an anchored vacancy: edges confined to the cube
/// with ones above `len - pivot` are replayed on the sites right of `pivot`,
/// behind a fully occupied stretch left of it.
fn shifted_onto_tail(flow: &Flow, len: usize, pivot: usize) -> Flow {
    let span = len - pivot;
    let all = (1usize << len) - 1;
    let cube = all & !((1usize << span) - 1);
    let low_mask = (1usize << span) - 1;
    let prefix = (1usize << (pivot - 1)) - 1;
    let lift = |id: usize| prefix | ((id & low_mask) << pivot);
    let mut out = Flow::new(len);
    for (a, b, v) in flow.iter() {
        if a & cube == cube && b & cube == cube {
            out.set(lift(a), lift(b), v).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::c_ell;

    #[test]
    fn anchored_copies_cover_the_advertised_states() {
        // mirror at ell = 3 on five sites: states with ones at and right of
        // the anchor map onto the anchored sink set
        let mut probe = Flow::new(5);
        probe.set(28, 29, 0.5).unwrap();
        probe.set(30, 31, 0.25).unwrap();
        probe.set(20, 28, 1.0).unwrap();
        let mirrored = mirrored_into_sink(&probe, 5, 3);
        assert_eq!(mirrored.edge_count(), 2);
        assert!((mirrored.get(24, 25) + 0.5).abs() < 1e-16);
        assert!((mirrored.get(26, 27) + 0.25).abs() < 1e-16);
        let sink = b_ell(5, 3).unwrap();
        for (a, b, _) in mirrored.iter() {
            assert!(sink.contains(a) && sink.contains(b));
        }

        // translate past pivot = 3: the cube with ones above two sites lands
        // on the states with an anchored vacancy and an occupied prefix
        let mut tail = Flow::new(5);
        tail.set(28, 29, 0.5).unwrap();
        tail.set(28, 30, 0.7).unwrap();
        tail.set(30, 31, 0.2).unwrap();
        tail.set(3, 28, 1.0).unwrap();
        let shifted = shifted_onto_tail(&tail, 5, 3);
        assert_eq!(shifted.edge_count(), 3);
        assert!((shifted.get(3, 11) - 0.5).abs() < 1e-16);
        assert!((shifted.get(3, 19) - 0.7).abs() < 1e-16);
        assert!((shifted.get(19, 27) - 0.2).abs() < 1e-16);
        let lifted = c_ell(5, 3).unwrap();
        for (a, b, _) in shifted.iter() {
            assert!(lifted.contains(a) && lifted.contains(b));
        }
    }

    #[test]
    fn equilibrium_flows_stay_inside_their_cube() {
        let params = Params::new(5, 0.2).unwrap();
        let net = Network::build(&params).unwrap();
        let one = StateSet::singleton(32, 31);
        for ell in 2..=4usize {
            let flow = equilibrium_of(&net, &one, &b_ell(5, ell).unwrap()).unwrap();
            let cube = 31usize & !((1usize << ell) - 1);
            for (a, b, _) in flow.iter() {
                assert_eq!(a & cube, cube, "ell={ell}");
                assert_eq!(b & cube, cube, "ell={ell}");
            }
        }
    }

    #[test]
    fn first_doubling_certificate_matches_pinned_values() {
        let cert = resit_construction(1, 3, 0.3).unwrap();
        assert_eq!(cert.len_from, 3);
        assert_eq!(cert.len_to, 5);
        assert_eq!(cert.overlap, 1);
        assert!((cert.strength - 1.0).abs() < 1e-12);
        assert!(cert.divergence_residual < 1e-12);
        assert!(cert.sink_violation < 1e-12);
        for (got, expected) in [
            (cert.energy, 455.767956488810),
            (cert.r_prev, 115.946804826438),
            (cert.r_next, 207.968841447324),
            (cert.bound, 2782.723315834521),
        ] {
            assert!((got - expected).abs() / expected < 1e-9, "{got} vs {expected}");
        }
        assert!(cert.slack > 0.0);
        assert!(!cert.theta.is_empty());
    }

    #[test]
    fn certificates_hold_across_the_early_ladder() {
        let pinned = [
            (1usize, 0.1f64, 4385.347985963197f64, 418.758534899367f64, 1971.383949731412f64),
            (1, 0.2, 876.532660590278, 157.674153645833, 398.831608996304),
            (1, 0.3, 455.767956488810, 115.946804826438, 207.968841447324),
            (2, 0.1, 14045.96728805048, 2704.230383719358, 7802.18767010992),
            (2, 0.2, 2590.346582464872, 778.967986320907, 1373.588744417361),
            (2, 0.3, 1580.876555460594, 606.323152907650, 818.722057311978),
        ];
        for (i, q, energy, r_prev, r_next) in pinned {
            let cert = resit_construction(i, 3, q).unwrap();
            assert!((cert.energy - energy).abs() / energy < 1e-9, "i={i} q={q}");
            assert!((cert.r_prev - r_prev).abs() / r_prev < 1e-9, "i={i} q={q}");
            assert!((cert.r_next - r_next).abs() / r_next < 1e-9, "i={i} q={q}");
            assert!(cert.r_next <= cert.energy * (1.0 + 1e-9));
            assert!(cert.energy <= cert.bound);
            assert!(cert.slack > 0.0);
        }
    }

    #[test]
    fn ladder_steps_are_validated() {
        assert!(matches!(
            resit_construction(0, 3, 0.2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            resit_construction(1, 2, 0.2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            resit_construction(3, 3, 0.2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            resit_construction(3, 4, 0.2),
            Err(Error::LengthCap { .. })
        ));
        assert!(resit_construction(1, 3, 0.0).is_err());
    }
}

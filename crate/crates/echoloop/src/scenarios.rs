//! The canonical shipped scenarios.
//!
//! Three families cover the whole argument:
//!
//! - [`renninger`]: a negative-result setup — two always-on absorbers at
//!   different radii, weights Ω₁/4π = 1/4 and Ω₂/4π = 3/4.  No
//!   contingency, no loop; the baseline sanity check.
//! - [`maudlin`]: the contingent-absorber challenge.  A sits on the
//!   right at 1 m and always participates; B sits farther out on the
//!   left and participates *iff* A has not fired shortly after A's
//!   arrival time.  Under an open boundary the left offer can escape
//!   unconfirmed — the pathology — while perfect-absorber or
//!   big-bang-reflector boundaries restore a clean 50/50.
//! - [`maudlin_with_c`]: the same loop with an always-on backstop C
//!   behind B on the left, which repairs even the open boundary.
//!
//! All three use t₀ = 1 s, v = 1000 m/s, and a source at the origin, so
//! A's arrival is 1.001 s and B's contingency deadline defaults to
//! 1.001 s + [`CONTINGENCY_SLACK`](crate::scenario::CONTINGENCY_SLACK).
//! Matching JSON documents ship in the repository's `scenarios/`
//! directory and are tested to parse to exactly these setups.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::scenario::{
    build_scenario, AbsorberDoc, ActivationDoc, ActivationKind, BoundaryCondition, Channel,
    ScenarioDoc, Setup, Source,
};

fn source() -> Source {
    Source { emission_time: 1.0, speed: 1000.0, position: 0.0 }
}

fn always(name: &str, channel: &str, distance: f64) -> AbsorberDoc {
    AbsorberDoc {
        name: name.into(),
        channel: channel.into(),
        distance,
        activation: ActivationDoc { kind: ActivationKind::Always, reference: None, by: None },
    }
}

/// Negative-result scenario: absorber E1 covers a quarter of the full
/// solid angle at 1 m, E2 the remaining three quarters at 2 m.  The
/// channels carry amplitudes √(1/4) and √(3/4); not firing at E1 by
/// 1.001 s already settles the outcome on E2.
pub fn renninger() -> Setup {
    let doc = ScenarioDoc {
        label: "renninger".into(),
        source: source(),
        channels: vec![
            Channel { name: "E1".into(), direction: 1.0, amplitude: Complex64::new(0.5, 0.0) },
            Channel {
                name: "E2".into(),
                direction: -1.0,
                amplitude: Complex64::new(0.75_f64.sqrt(), 0.0),
            },
        ],
        absorbers: vec![always("E1", "E1", 1.0), always("E2", "E2", 2.0)],
        boundary: BoundaryCondition::Open,
        detector_chain: Vec::new(),
        horizon: None,
    };
    build_scenario(doc).expect("canonical scenario is valid")
}

fn maudlin_doc(boundary: BoundaryCondition, with_c: bool) -> ScenarioDoc {
    let mut absorbers = vec![
        always("A", "R", 1.0),
        AbsorberDoc {
            name: "B".into(),
            channel: "L".into(),
            distance: 2.0,
            activation: ActivationDoc {
                kind: ActivationKind::NotFired,
                reference: Some("A".into()),
                by: None, // defaults to A's arrival + slack: "soon after"
            },
        },
    ];
    if with_c {
        absorbers.push(always("C", "L", 3.0));
    }
    let label = if with_c {
        "maudlin-with-c".to_string()
    } else {
        format!("maudlin-{}", boundary.token())
    };
    ScenarioDoc {
        label,
        source: source(),
        channels: vec![
            Channel {
                name: "L".into(),
                direction: -1.0,
                amplitude: Complex64::new(FRAC_1_SQRT_2, 0.0),
            },
            Channel {
                name: "R".into(),
                direction: 1.0,
                amplitude: Complex64::new(FRAC_1_SQRT_2, 0.0),
            },
        ],
        absorbers,
        boundary,
        detector_chain: Vec::new(),
        horizon: None,
    }
}

/// The contingent-absorber challenge: equal left/right amplitudes,
/// always-on A on the right at 1 m, and B on the left at 2 m active iff
/// A has not fired by its deadline.  Labelled `maudlin-<boundary>`.
pub fn maudlin(boundary: BoundaryCondition) -> Setup {
    build_scenario(maudlin_doc(boundary, false)).expect("canonical scenario is valid")
}

/// [`maudlin`] plus an always-on backstop C on the left at 3 m, which
/// guarantees a left confirmation whether or not B swings.  Labelled
/// `maudlin-with-c`.
pub fn maudlin_with_c(boundary: BoundaryCondition) -> Setup {
    build_scenario(maudlin_doc(boundary, true)).expect("canonical scenario is valid")
}

//! Source state, scenario catalog, parameter layout and CHSH evaluation.
//!
//! Slots are ordered `(A1, A2, B1, B2)` and
//! `S = |E(A1 B1) + E(A1 B2) + E(A2 B1) - E(A2 B2)|`.
//!
//! Parameter layout, per slot in order:
//!
//! | slot             | `do`           | `sdo`                   | `squeeze-only` |
//! |------------------|----------------|-------------------------|----------------|
//! | on-off           | `re_alpha, im_alpha` | `re_alpha, im_alpha, r, phi_xi` | `r, phi_xi` |
//! | homodyne         | `theta, center, width` | same              | same           |
//!
//! A homodyne bin is `[center - width/2, center + width/2]`, clamped to `±12`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
// Float math for no_std; unused where the toolchain provides it inherently.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::GaussianParams;
use crate::measurement::{
    homodyne_observable, onoff_observable, HomodyneParams, LocalObservable, Mat2, OnOffParams,
};

/// Basis order of two-mode density matrices: `|00>, |01>, |10>, |11>`
/// with `|ab> = |a>_A |b>_B`.
pub type Mat4 = [[Complex64; 4]; 4];

/// `rho = p |psi><psi| + (1 - p) |00><00|`, `|psi> = (|10> + |01>)/sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceState {
    pub p: f64,
    pub rho: Mat4,
}

impl SourceState {
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|k| self.rho[k][k]).sum()
    }
}

pub fn source_state(p: f64) -> Result<SourceState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut rho = [[zero; 4]; 4];
    rho[0][0] = Complex64::new(1.0 - p, 0.0);
    for row in &mut rho[1..3] {
        row[1..3].fill(Complex64::new(0.5 * p, 0.0));
    }
    Ok(SourceState { p, rho })
}

/// `Tr[rho (A ⊗ B)]`.
pub fn correlation(state: &SourceState, a: &LocalObservable, b: &LocalObservable) -> f64 {
    let value = trace_product(&state.rho, &a.matrix, &b.matrix);
    debug_assert!(
        value.im.abs() <= 1e-10,
        "correlation has imaginary part {}",
        value.im
    );
    value.re
}

fn trace_product(rho: &Mat4, a: &Mat2, b: &Mat2) -> Complex64 {
    // (A ⊗ B)_{(k l),(i j)} = A_{k i} B_{l j}
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    acc += rho[2 * i + j][2 * k + l] * a[k][i] * b[l][j];
                }
            }
        }
    }
    acc
}

/// `|E11 + E12 + E21 - E22|`.
pub fn chsh_value(e11: f64, e12: f64, e21: f64, e22: f64) -> f64 {
    (e11 + e12 + e21 - e22).abs()
}

/// Assistance allowed before each on-off detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Variant {
    /// Displacement only.
    #[cfg_attr(feature = "serde", serde(rename = "do"))]
    Do,
    /// Squeezing and displacement.
    #[cfg_attr(feature = "serde", serde(rename = "sdo"))]
    Sdo,
    /// Squeezing only.
    #[cfg_attr(feature = "serde", serde(rename = "squeeze-only"))]
    SqueezeOnly,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Do, Variant::Sdo, Variant::SqueezeOnly];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Do => "do",
            Variant::Sdo => "sdo",
            Variant::SqueezeOnly => "squeeze-only",
        }
    }

    fn allows_displacement(self) -> bool {
        !matches!(self, Variant::SqueezeOnly)
    }

    fn allows_squeezing(self) -> bool {
        !matches!(self, Variant::Do)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "variant",
                name: String::from(s),
            })
    }
}

/// Catalog of measurement patterns, named by the number of homodyne slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ScenarioName {
    #[cfg_attr(feature = "serde", serde(rename = "4h"))]
    FourHomodyne,
    #[cfg_attr(feature = "serde", serde(rename = "3h"))]
    ThreeHomodyne,
    /// One party on-off only, the other homodyne only.
    #[cfg_attr(feature = "serde", serde(rename = "2h-i"))]
    TwoHomodyneSplit,
    /// Each party has one on-off and one homodyne setting.
    #[cfg_attr(feature = "serde", serde(rename = "2h-ii"))]
    TwoHomodyneMixed,
    #[cfg_attr(feature = "serde", serde(rename = "1h"))]
    OneHomodyne,
    #[cfg_attr(feature = "serde", serde(rename = "0h"))]
    ZeroHomodyne,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 6] = [
        ScenarioName::FourHomodyne,
        ScenarioName::ThreeHomodyne,
        ScenarioName::TwoHomodyneSplit,
        ScenarioName::TwoHomodyneMixed,
        ScenarioName::OneHomodyne,
        ScenarioName::ZeroHomodyne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioName::FourHomodyne => "4h",
            ScenarioName::ThreeHomodyne => "3h",
            ScenarioName::TwoHomodyneSplit => "2h-i",
            ScenarioName::TwoHomodyneMixed => "2h-ii",
            ScenarioName::OneHomodyne => "1h",
            ScenarioName::ZeroHomodyne => "0h",
        }
    }

    /// Slot kinds in `(A1, A2, B1, B2)` order.
    pub fn pattern(self) -> [SlotKind; 4] {
        use SlotKind::{Homodyne as H, OnOff as O};
        match self {
            ScenarioName::FourHomodyne => [H, H, H, H],
            ScenarioName::ThreeHomodyne => [O, H, H, H],
            ScenarioName::TwoHomodyneSplit => [O, O, H, H],
            ScenarioName::TwoHomodyneMixed => [O, H, O, H],
            ScenarioName::OneHomodyne => [O, H, O, O],
            ScenarioName::ZeroHomodyne => [O, O, O, O],
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "scenario",
                name: String::from(s),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotKind {
    OnOff,
    Homodyne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasurementSlot {
    pub kind: SlotKind,
    pub allow_displacement: bool,
    pub allow_squeezing: bool,
}

impl MeasurementSlot {
    fn new(kind: SlotKind, variant: Variant) -> Self {
        let onoff = kind == SlotKind::OnOff;
        Self {
            kind,
            allow_displacement: onoff && variant.allows_displacement(),
            allow_squeezing: onoff && variant.allows_squeezing(),
        }
    }

    /// Coordinate labels of this slot in a [`ParamVector`].
    pub fn labels(&self) -> &'static [&'static str] {
        match (self.kind, self.allow_displacement, self.allow_squeezing) {
            (SlotKind::Homodyne, ..) => &["theta", "center", "width"],
            (SlotKind::OnOff, true, true) => &["re_alpha", "im_alpha", "r", "phi_xi"],
            (SlotKind::OnOff, true, false) => &["re_alpha", "im_alpha"],
            (SlotKind::OnOff, false, true) => &["r", "phi_xi"],
            (SlotKind::OnOff, false, false) => &[],
        }
    }

    pub fn len(&self) -> usize {
        self.labels().len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels().is_empty()
    }
}

/// Names of the four measurement slots.
pub const SLOT_NAMES: [&str; 4] = ["A1", "A2", "B1", "B2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub name: ScenarioName,
    pub variant: Variant,
    pub slots: [MeasurementSlot; 4],
}

impl Scenario {
    pub fn new(name: ScenarioName, variant: Variant) -> Self {
        let slots = name
            .pattern()
            .map(|kind| MeasurementSlot::new(kind, variant));
        Self {
            name,
            variant,
            slots,
        }
    }

    pub fn parse(name: &str, variant: &str) -> Result<Self> {
        Ok(Self::new(name.parse()?, variant.parse()?))
    }

    pub fn homodyne_count(&self) -> usize {
        self.slots
            .iter()
            .filter(|s| s.kind == SlotKind::Homodyne)
            .count()
    }

    /// Number of real parameters.
    pub fn param_len(&self) -> usize {
        self.slots.iter().map(MeasurementSlot::len).sum()
    }

    /// Flat coordinate labels such as `A1.re_alpha` or `B2.width`.
    pub fn param_labels(&self) -> Vec<String> {
        self.slots
            .iter()
            .zip(SLOT_NAMES)
            .flat_map(|(slot, name)| slot.labels().iter().map(move |l| format!("{name}.{l}")))
            .collect()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name, self.variant)
    }
}

/// Flat real parameter vector following the scenario layout.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn zeros(len: usize) -> Self {
        Self(alloc::vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Structured settings of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum SlotParams {
    OnOff {
        re_alpha: f64,
        im_alpha: f64,
        /// Signed squeezing modulus.
        r: f64,
        phi_xi: f64,
    },
    Homodyne {
        theta: f64,
        center: f64,
        width: f64,
    },
}

impl SlotParams {
    pub fn onoff(alpha: Complex64, r: f64, phi_xi: f64) -> Self {
        SlotParams::OnOff {
            re_alpha: alpha.re,
            im_alpha: alpha.im,
            r,
            phi_xi,
        }
    }

    /// Homodyne slot from explicit bin endpoints.
    pub fn homodyne_bin(theta: f64, z1: f64, z2: f64) -> Self {
        SlotParams::Homodyne {
            theta,
            center: 0.5 * (z1 + z2),
            width: z2 - z1,
        }
    }

    pub fn kind(&self) -> SlotKind {
        match self {
            SlotParams::OnOff { .. } => SlotKind::OnOff,
            SlotParams::Homodyne { .. } => SlotKind::Homodyne,
        }
    }

    pub fn gaussian(&self) -> Option<GaussianParams> {
        match *self {
            SlotParams::OnOff {
                re_alpha,
                im_alpha,
                r,
                phi_xi,
            } => Some(GaussianParams::from_polar_squeezing(
                Complex64::new(re_alpha, im_alpha),
                r,
                phi_xi,
            )),
            SlotParams::Homodyne { .. } => None,
        }
    }

    /// Homodyne bin `[center - width/2, center + width/2]`, clamped.
    pub fn homodyne(&self) -> Option<Result<HomodyneParams>> {
        match *self {
            SlotParams::Homodyne {
                theta,
                center,
                width,
            } => Some(if width > 0.0 {
                HomodyneParams::new(theta, center - 0.5 * width, center + 0.5 * width)
            } else {
                Err(Error::InvalidParameter {
                    name: "width",
                    value: width,
                })
            }),
            SlotParams::OnOff { .. } => None,
        }
    }

    /// Local observable of this slot; `eta` applies to on-off slots only.
    pub fn observable(&self, eta: f64, cutoff: usize) -> Result<LocalObservable> {
        match self {
            SlotParams::OnOff { .. } => {
                let gauss = self.gaussian().expect("on-off slot");
                onoff_observable(&OnOffParams::new(gauss, eta)?, cutoff)
            }
            SlotParams::Homodyne { .. } => {
                homodyne_observable(&self.homodyne().expect("homodyne slot")?)
            }
        }
    }
}

/// Labelled settings of all four slots.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StructuredParams {
    #[cfg_attr(feature = "serde", serde(rename = "A1"))]
    pub a1: SlotParams,
    #[cfg_attr(feature = "serde", serde(rename = "A2"))]
    pub a2: SlotParams,
    #[cfg_attr(feature = "serde", serde(rename = "B1"))]
    pub b1: SlotParams,
    #[cfg_attr(feature = "serde", serde(rename = "B2"))]
    pub b2: SlotParams,
}

impl StructuredParams {
    pub fn from_slots(slots: [SlotParams; 4]) -> Self {
        let [a1, a2, b1, b2] = slots;
        Self { a1, a2, b1, b2 }
    }

    pub fn slots(&self) -> [SlotParams; 4] {
        [self.a1, self.a2, self.b1, self.b2]
    }
}

/// Flattens structured settings into the scenario layout.
///
/// Fails when a slot kind does not match the pattern or when the variant
/// forbids a non-zero coordinate (e.g. squeezing under `do`).
pub fn pack_params(scenario: &Scenario, params: &StructuredParams) -> Result<ParamVector> {
    let mut out = Vec::with_capacity(scenario.param_len());
    for ((slot, values), name) in scenario.slots.iter().zip(params.slots()).zip(SLOT_NAMES) {
        if slot.kind != values.kind() {
            let expected = match slot.kind {
                SlotKind::OnOff => "on-off",
                SlotKind::Homodyne => "homodyne",
            };
            return Err(Error::SlotMismatch {
                slot: name,
                expected,
            });
        }
        match values {
            SlotParams::Homodyne {
                theta,
                center,
                width,
            } => out.extend([theta, center, width]),
            SlotParams::OnOff {
                re_alpha,
                im_alpha,
                r,
                phi_xi,
            } => {
                if slot.allow_displacement {
                    out.extend([re_alpha, im_alpha]);
                } else if re_alpha != 0.0 || im_alpha != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "alpha",
                        value: re_alpha.hypot(im_alpha),
                    });
                }
                if slot.allow_squeezing {
                    out.extend([r, phi_xi]);
                } else if r != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "r",
                        value: r,
                    });
                }
            }
        }
    }
    Ok(ParamVector(out))
}

/// Expands a flat vector into structured settings; coordinates the variant
/// does not expose are zero.
pub fn unpack_params(scenario: &Scenario, params: &ParamVector) -> Result<StructuredParams> {
    let expected = scenario.param_len();
    if params.len() != expected {
        return Err(Error::LayoutMismatch {
            expected,
            found: params.len(),
        });
    }
    if params.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("parameter vector"));
    }
    let mut values = params.0.iter().copied();
    let mut next = || values.next().expect("length checked");
    let slots = scenario.slots.map(|slot| match slot.kind {
        SlotKind::Homodyne => SlotParams::Homodyne {
            theta: next(),
            center: next(),
            width: next(),
        },
        SlotKind::OnOff => {
            let (re_alpha, im_alpha) = if slot.allow_displacement {
                (next(), next())
            } else {
                (0.0, 0.0)
            };
            let (r, phi_xi) = if slot.allow_squeezing {
                (next(), next())
            } else {
                (0.0, 0.0)
            };
            SlotParams::OnOff {
                re_alpha,
                im_alpha,
                r,
                phi_xi,
            }
        }
    });
    Ok(StructuredParams::from_slots(slots))
}

/// The four correlators `[E11, E12, E21, E22]` and the four observables.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub observables: [LocalObservable; 4],
    pub correlations: [f64; 4],
    pub s: f64,
}

pub fn evaluate_structured(
    params: &StructuredParams,
    eta: f64,
    p: f64,
    cutoff: usize,
) -> Result<Evaluation> {
    let state = source_state(p)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
        });
    }
    let [a1, a2, b1, b2] = params.slots();
    let observables = [
        a1.observable(eta, cutoff)?,
        a2.observable(eta, cutoff)?,
        b1.observable(eta, cutoff)?,
        b2.observable(eta, cutoff)?,
    ];
    let [oa1, oa2, ob1, ob2] = &observables;
    let correlations = [
        correlation(&state, oa1, ob1),
        correlation(&state, oa1, ob2),
        correlation(&state, oa2, ob1),
        correlation(&state, oa2, ob2),
    ];
    let [e11, e12, e21, e22] = correlations;
    Ok(Evaluation {
        observables,
        correlations,
        s: chsh_value(e11, e12, e21, e22),
    })
}

/// CHSH value of `params` under `scenario` with on-off efficiency `eta`
/// and source efficiency `p`.
pub fn scenario_evaluate(
    scenario: &Scenario,
    params: &ParamVector,
    eta: f64,
    p: f64,
    cutoff: usize,
) -> Result<f64> {
    let structured = unpack_params(scenario, params)?;
    Ok(evaluate_structured(&structured, eta, p, cutoff)?.s)
}

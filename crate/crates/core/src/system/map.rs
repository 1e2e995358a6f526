use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use super::space::{Point, SampleSpace, Topology, EPS_SPACE};
use crate::error::{Error, Result};

/// Pure point evaluator writing `dimension` output coordinates.
pub type Evaluator = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Region a built-in map acts on; drives grid construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `[0, 1)^d`
    UnitBox,
    /// Closed unit disk centred at the origin.
    UnitDisk,
}

#[derive(Clone)]
enum Kind {
    Identity,
    Doubling,
    Tent { slope: f64 },
    Logistic { r: f64 },
    Baker,
    Rotation { alpha: f64 },
    Oscillator { cos: f64, sin: f64 },
    Custom { forward: Evaluator, inverse: Option<Evaluator> },
}

/// A discrete-time flow `Φ` with an optional inverse.
#[derive(Clone)]
pub struct DynamicalMap {
    name: String,
    params: BTreeMap<String, f64>,
    dimension: usize,
    topology: Vec<Topology>,
    domain: Domain,
    kind: Kind,
}

impl fmt::Debug for DynamicalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalMap")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("dimension", &self.dimension)
            .field("invertible", &self.invertible())
            .finish()
    }
}

/// Names and parameter keys of the built-in map registry.
pub const BUILTIN_MAPS: &[(&str, &[&str], &str)] = &[
    ("identity", &["dimension"], "identity map on [0,1)^d"),
    ("doubling", &[], "x -> 2x mod 1 on the circle"),
    ("tent", &["slope"], "tent map with slope s (default 2) on [0,1]"),
    ("logistic", &["r"], "logistic map r x (1 - x) (default r = 4)"),
    ("baker", &[], "invertible baker's map on the unit square"),
    ("rotation", &["alpha"], "circle rotation x -> x + alpha mod 1"),
    (
        "oscillator",
        &["angle"],
        "phase-plane rotation by angle (fraction of a turn) on the unit disk",
    ),
];

fn wrap_unit(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

impl DynamicalMap {
    fn builtin(
        name: &str,
        params: &[(&str, f64)],
        dimension: usize,
        topology: Vec<Topology>,
        domain: Domain,
        kind: Kind,
    ) -> Self {
        DynamicalMap {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            dimension,
            topology,
            domain,
            kind,
        }
    }

    pub fn identity(dimension: usize) -> Self {
        Self::builtin(
            "identity",
            &[("dimension", dimension as f64)],
            dimension,
            vec![Topology::Line; dimension],
            Domain::UnitBox,
            Kind::Identity,
        )
    }

    pub fn doubling() -> Self {
        Self::builtin(
            "doubling",
            &[],
            1,
            vec![Topology::Circle],
            Domain::UnitBox,
            Kind::Doubling,
        )
    }

    pub fn tent(slope: f64) -> Result<Self> {
        if !(slope > 0.0 && slope <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "tent slope {slope} outside (0, 2]"
            )));
        }
        Ok(Self::builtin(
            "tent",
            &[("slope", slope)],
            1,
            vec![Topology::Line],
            Domain::UnitBox,
            Kind::Tent { slope },
        ))
    }

    pub fn logistic(r: f64) -> Result<Self> {
        if !(0.0..=4.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "logistic r {r} outside [0, 4]"
            )));
        }
        Ok(Self::builtin(
            "logistic",
            &[("r", r)],
            1,
            vec![Topology::Line],
            Domain::UnitBox,
            Kind::Logistic { r },
        ))
    }

    pub fn baker() -> Self {
        Self::builtin(
            "baker",
            &[],
            2,
            vec![Topology::Line; 2],
            Domain::UnitBox,
            Kind::Baker,
        )
    }

    pub fn rotation(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("rotation angle must be finite".into()));
        }
        Ok(Self::builtin(
            "rotation",
            &[("alpha", alpha)],
            1,
            vec![Topology::Circle],
            Domain::UnitBox,
            Kind::Rotation {
                alpha: wrap_unit(alpha),
            },
        ))
    }

    /// Discretised harmonic oscillator: rotation of the phase plane by
    /// `angle` turns per step, `(q, p) -> (q cos θ + p sin θ, p cos θ - q sin θ)`.
    pub fn oscillator(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidParameter("oscillator angle must be finite".into()));
        }
        let theta = angle * TAU;
        Ok(Self::builtin(
            "oscillator",
            &[("angle", angle)],
            2,
            vec![Topology::Line; 2],
            Domain::UnitDisk,
            Kind::Oscillator {
                cos: theta.cos(),
                sin: theta.sin(),
            },
        ))
    }

    /// User-supplied map. `inverse`, when given, must undo `forward`.
    pub fn custom(
        name: impl Into<String>,
        topology: Vec<Topology>,
        forward: Evaluator,
        inverse: Option<Evaluator>,
    ) -> Self {
        DynamicalMap {
            name: name.into(),
            params: BTreeMap::new(),
            dimension: topology.len(),
            topology,
            domain: Domain::UnitBox,
            kind: Kind::Custom { forward, inverse },
        }
    }

    /// Map on a `SampleSpace::discrete` space given by an index table.
    pub fn from_table(name: impl Into<String>, table: Vec<usize>) -> Self {
        let forward_table = Arc::new(table);
        let lookup = forward_table.clone();
        let forward: Evaluator = Arc::new(move |x, out| {
            out[0] = lookup[x[0] as usize] as f64;
        });
        let n = forward_table.len();
        let mut inverse_table = vec![usize::MAX; n];
        let mut bijective = true;
        for (i, &j) in forward_table.iter().enumerate() {
            if j >= n || inverse_table[j] != usize::MAX {
                bijective = false;
                break;
            }
            inverse_table[j] = i;
        }
        let inverse: Option<Evaluator> = bijective.then(|| {
            let inv = Arc::new(inverse_table);
            Arc::new(move |x: &[f64], out: &mut [f64]| {
                out[0] = inv[x[0] as usize] as f64;
            }) as Evaluator
        });
        Self::custom(name, vec![Topology::Line], forward, inverse)
    }

    /// Look up a registry map by name with optional parameters.
    pub fn by_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        let known: &[&str] = BUILTIN_MAPS
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, keys, _)| *keys)
            .ok_or_else(|| Error::UnknownMap(name.to_string()))?;
        if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "map `{name}` has no parameter `{k}`"
            )));
        }
        match name {
            "identity" => {
                let d = get("dimension", 1.0);
                if d < 1.0 || d.fract() != 0.0 || d > 8.0 {
                    return Err(Error::InvalidParameter(format!("bad dimension {d}")));
                }
                Ok(Self::identity(d as usize))
            }
            "doubling" => Ok(Self::doubling()),
            "tent" => Self::tent(get("slope", 2.0)),
            "logistic" => Self::logistic(get("r", 4.0)),
            "baker" => Ok(Self::baker()),
            "rotation" => Self::rotation(get("alpha", 0.25)),
            "oscillator" => Self::oscillator(get("angle", 0.25)),
            _ => unreachable!("registry lookup succeeded"),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn topology(&self) -> &[Topology] {
        &self.topology
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn invertible(&self) -> bool {
        match &self.kind {
            Kind::Identity | Kind::Baker | Kind::Rotation { .. } | Kind::Oscillator { .. } => true,
            Kind::Custom { inverse, .. } => inverse.is_some(),
            _ => false,
        }
    }

    pub(crate) fn is_doubling(&self) -> bool {
        matches!(self.kind, Kind::Doubling)
    }

    /// Evaluate `Φ(x)` into `out`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            Kind::Identity => out.copy_from_slice(x),
            Kind::Doubling => {
                let y = 2.0 * x[0];
                out[0] = if y >= 1.0 { y - 1.0 } else { y };
            }
            Kind::Tent { slope } => {
                out[0] = if x[0] < 0.5 {
                    slope * x[0]
                } else {
                    slope * (1.0 - x[0])
                };
            }
            Kind::Logistic { r } => out[0] = r * x[0] * (1.0 - x[0]),
            Kind::Baker => {
                if x[0] < 0.5 {
                    out[0] = 2.0 * x[0];
                    out[1] = 0.5 * x[1];
                } else {
                    out[0] = 2.0 * x[0] - 1.0;
                    out[1] = 0.5 * (x[1] + 1.0);
                }
            }
            Kind::Rotation { alpha } => out[0] = wrap_unit(x[0] + alpha),
            Kind::Oscillator { cos, sin } => {
                let (q, p) = (x[0], x[1]);
                out[0] = q * cos + p * sin;
                out[1] = p * cos - q * sin;
            }
            Kind::Custom { forward, .. } => forward(x, out),
        }
    }

    /// Evaluate `Φ^{-1}(x)` into `out`.
    pub fn apply_inverse(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        match &self.kind {
            Kind::Identity => out.copy_from_slice(x),
            Kind::Baker => {
                if x[1] < 0.5 {
                    out[0] = 0.5 * x[0];
                    out[1] = 2.0 * x[1];
                } else {
                    out[0] = 0.5 * (x[0] + 1.0);
                    out[1] = 2.0 * x[1] - 1.0;
                }
            }
            Kind::Rotation { alpha } => out[0] = wrap_unit(x[0] - alpha),
            Kind::Oscillator { cos, sin } => {
                let (q, p) = (x[0], x[1]);
                out[0] = q * cos - p * sin;
                out[1] = p * cos + q * sin;
            }
            Kind::Custom {
                inverse: Some(inverse),
                ..
            } => inverse(x, out),
            _ => {
                return Err(Error::NegativeTimeOnNonInvertible {
                    map: self.name.clone(),
                    t: -1,
                })
            }
        }
        Ok(())
    }

    pub fn forward(&self, x: &Point) -> Point {
        let mut out = vec![0.0; self.dimension];
        self.apply(x.coords(), &mut out);
        Point(out)
    }

    /// `Φ^t(x0)`; negative `t` requires an invertible map.
    pub fn iterate(&self, x0: &Point, t: i64) -> Result<Point> {
        self.check_dimension(x0)?;
        if t < 0 && !self.invertible() {
            return Err(Error::NegativeTimeOnNonInvertible {
                map: self.name.clone(),
                t,
            });
        }
        let mut cur = x0.0.clone();
        let mut next = vec![0.0; self.dimension];
        for _ in 0..t.unsigned_abs() {
            if t > 0 {
                self.apply(&cur, &mut next);
            } else {
                self.apply_inverse(&cur, &mut next)?;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(Point(cur))
    }

    /// `[x0, Φ(x0), …, Φ^{n-1}(x0)]`.
    pub fn trajectory(&self, x0: &Point, n: usize) -> Result<Vec<Point>> {
        self.check_dimension(x0)?;
        if n < 1 {
            return Err(Error::InvalidParameter("trajectory length must be >= 1".into()));
        }
        let mut out = Vec::with_capacity(n);
        out.push(x0.clone());
        for t in 1..n {
            out.push(self.forward(&out[t - 1]));
        }
        Ok(out)
    }

    /// Verify `Φ^{-1}(Φ(x)) = x` within `EPS_SPACE` on every sample point.
    pub fn check_inverse(&self, space: &SampleSpace) -> Result<()> {
        if !self.invertible() {
            return Err(Error::NegativeTimeOnNonInvertible {
                map: self.name.clone(),
                t: -1,
            });
        }
        let mut img = vec![0.0; self.dimension];
        let mut back = vec![0.0; self.dimension];
        for (i, x) in space.points().enumerate() {
            self.apply(x, &mut img);
            self.apply_inverse(&img, &mut back)?;
            let off = x
                .iter()
                .zip(&back)
                .zip(&self.topology)
                .any(|((a, b), t)| {
                    super::index::coord_delta(*a, *b, *t == Topology::Circle) > EPS_SPACE
                });
            if off {
                return Err(Error::InvalidParameter(format!(
                    "inverse fails to undo `{}` at point {i}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    fn check_dimension(&self, x: &Point) -> Result<()> {
        if x.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: x.dimension(),
            });
        }
        if x.coords().iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Point, b: f64) -> bool {
        (a.0[0] - b).abs() < 1e-12
    }

    #[test]
    fn doubling_three_steps() {
        let m = DynamicalMap::doubling();
        assert_eq!(m.iterate(&0.1.into(), 3).unwrap(), Point::scalar(0.8));
    }

    #[test]
    fn zero_time_is_identity() {
        let m = DynamicalMap::logistic(3.7).unwrap();
        assert_eq!(m.iterate(&0.123.into(), 0).unwrap(), Point::scalar(0.123));
    }

    #[test]
    fn quarter_rotation_twice() {
        let m = DynamicalMap::rotation(0.25).unwrap();
        assert!(close(&m.iterate(&0.9.into(), 2).unwrap(), 0.4));
    }

    #[test]
    fn trajectories() {
        let d = DynamicalMap::doubling();
        assert_eq!(
            d.trajectory(&0.1.into(), 3).unwrap(),
            vec![Point::scalar(0.1), Point::scalar(0.2), Point::scalar(0.4)]
        );
        assert_eq!(d.trajectory(&0.3.into(), 1).unwrap(), vec![Point::scalar(0.3)]);
        let t = DynamicalMap::tent(2.0).unwrap().trajectory(&0.4.into(), 3).unwrap();
        assert!(close(&t[0], 0.4) && close(&t[1], 0.8) && close(&t[2], 0.4));
    }

    #[test]
    fn negative_time_needs_inverse() {
        let err = DynamicalMap::doubling().iterate(&0.1.into(), -1).unwrap_err();
        assert!(matches!(err, Error::NegativeTimeOnNonInvertible { t: -1, .. }));
        let back = DynamicalMap::rotation(0.3)
            .unwrap()
            .iterate(&0.1.into(), -2)
            .unwrap();
        assert!(close(&back, 0.5));
    }

    #[test]
    fn baker_inverse_round_trip() {
        let m = DynamicalMap::baker();
        let x = Point::new(vec![0.3, 0.7]);
        let y = m.iterate(&x, 5).unwrap();
        let z = m.iterate(&y, -5).unwrap();
        assert!((z.0[0] - 0.3).abs() < 1e-12 && (z.0[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn registry_rejects_unknown_names_and_params() {
        let none = BTreeMap::new();
        assert!(matches!(
            DynamicalMap::by_name("lorenz", &none),
            Err(Error::UnknownMap(_))
        ));
        let bad: BTreeMap<String, f64> = [("r".to_string(), 3.0)].into();
        assert!(matches!(
            DynamicalMap::by_name("doubling", &bad),
            Err(Error::InvalidParameter(_))
        ));
        let ok: BTreeMap<String, f64> = [("r".to_string(), 3.5)].into();
        assert_eq!(DynamicalMap::by_name("logistic", &ok).unwrap().params()["r"], 3.5);
    }

    #[test]
    fn table_maps_detect_bijectivity() {
        assert!(DynamicalMap::from_table("p", vec![1, 2, 0]).invertible());
        assert!(!DynamicalMap::from_table("f", vec![1, 1, 0]).invertible());
    }
}

//! Quantities written with an explicit unit suffix, e.g. `"60 cm"`, `"77 g"`,
//! `"50 deg"`, `"2 ms"`. Values are converted to SI on deserialization; bare
//! numbers are rejected for dimensional fields.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

/// Splits `"1.5e-2 m"` / `"15mm"` into the number and the trimmed unit.
pub fn split_quantity(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let mut best = None;
    for (i, _) in text.char_indices().skip(1).chain(std::iter::once((text.len(), ' '))) {
        if let Ok(v) = text[..i].parse::<f64>() {
            best = Some((v, text[i..].trim()));
        }
    }
    best.filter(|(v, _)| v.is_finite())
}

/// Converts `text` using a unit table of `(suffix, factor to SI)`.
pub fn parse_quantity(text: &str, kind: &str, units: &[(&str, f64)]) -> Result<f64, String> {
    let names = || units.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ");
    let (value, unit) =
        split_quantity(text).ok_or_else(|| format!("`{text}` is not a {kind} (expected e.g. \"1 {}\")", units[0].0))?;
    units
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, factor)| value * factor)
        .ok_or_else(|| format!("`{text}`: unit `{unit}` is not a {kind} unit (use one of: {})", names()))
}

struct QuantityVisitor {
    kind: &'static str,
    units: &'static [(&'static str, f64)],
}

impl Visitor<'_> for QuantityVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a {} string with a unit, e.g. \"1 {}\"", self.kind, self.units[0].0)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        parse_quantity(v, self.kind, self.units).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Err(E::custom(format!("{} `{v}` needs a unit suffix, e.g. \"{v} {}\"", self.kind, self.units[0].0)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        self.visit_i64(v as i64)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Err(E::custom(format!("{} `{v}` needs a unit suffix, e.g. \"{v} {}\"", self.kind, self.units[0].0)))
    }
}

macro_rules! quantity {
    ($(#[$doc:meta])* $name:ident, $kind:literal, [$(($unit:literal, $factor:expr)),+ $(,)?]) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Debug, PartialEq)]
        pub struct $name(pub f64);

        impl $name {
            pub const UNITS: &'static [(&'static str, f64)] = &[$(($unit, $factor)),+];

            pub fn si(self) -> f64 {
                self.0
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                d.deserialize_any(QuantityVisitor { kind: $kind, units: Self::UNITS }).map($name)
            }
        }
    };
}

quantity!(
    /// Metres.
    Length, "length", [("m", 1.0), ("cm", 1e-2), ("mm", 1e-3)]
);
quantity!(
    /// Kilograms.
    Mass, "mass", [("kg", 1.0), ("g", 1e-3)]
);
quantity!(
    /// Radians.
    Angle, "angle", [("deg", std::f64::consts::PI / 180.0), ("rad", 1.0)]
);
quantity!(
    /// Seconds.
    Time, "time", [("s", 1.0), ("ms", 1e-3)]
);
quantity!(
    /// Newtons.
    Force, "force", [("N", 1.0), ("mN", 1e-3)]
);
quantity!(
    /// Newton metres.
    Torque, "torque", [("N m", 1.0), ("Nm", 1.0), ("mN m", 1e-3), ("mNm", 1e-3)]
);
quantity!(
    /// Radians per second.
    AngularSpeed, "angular speed", [("rad/s", 1.0), ("deg/s", std::f64::consts::PI / 180.0), ("rpm", std::f64::consts::PI / 30.0)]
);
quantity!(
    /// Inverse seconds.
    Bandwidth, "bandwidth", [("1/s", 1.0)]
);

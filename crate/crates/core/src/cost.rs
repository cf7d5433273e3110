//! Gate-equivalent (GE) area arithmetic for the data path and key path.
//!
//! Quantities are exact decimals stored as integer hundredths of a GE, so
//! weights like 4.25 sum without rounding. Bills are plain JSON:
//!
//! ```json
//! { "name": "data path",
//!   "rows": [ { "label": "64-Bit Register", "component": "DFF", "multiplicity": 64, "width": 1 },
//!             { "label": "1 SBOX", "component": "SBOX", "multiplicity": 1, "width": 1, "fixed_ge": "24" } ] }
//! ```
//!
//! A row contributes `multiplicity * width * weight`, where the weight is the
//! row's `fixed_ge` if present and the gate table entry otherwise.
//!
//! The canonical gate weights are the published cell areas (listed in µm in
//! the source table but used directly as GE weights).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact GE quantity in hundredths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ge(i64);

impl Ge {
    pub const ZERO: Ge = Ge(0);

    pub fn from_hundredths(h: i64) -> Self {
        Ge(h)
    }

    pub fn hundredths(self) -> i64 {
        self.0
    }

    pub fn whole(n: i64) -> Self {
        Ge(n * 100)
    }

    fn times(self, n: u32) -> Self {
        Ge(self.0 * n as i64)
    }
}

impl std::ops::Add for Ge {
    type Output = Ge;
    fn add(self, rhs: Ge) -> Ge {
        Ge(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Ge {
    fn sum<I: Iterator<Item = Ge>>(iter: I) -> Ge {
        iter.fold(Ge::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Ge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let (int, frac) = (abs / 100, abs % 100);
        match frac {
            0 => write!(f, "{sign}{int}"),
            f2 if f2 % 10 == 0 => write!(f, "{sign}{int}.{}", f2 / 10),
            f2 => write!(f, "{sign}{int}.{f2:02}"),
        }
    }
}

impl FromStr for Ge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::BadQuantity(s.to_string());
        let t = s.trim();
        let (neg, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int, frac) = match t.split_once('.') {
            Some((_, "")) => return Err(bad()),
            Some(parts) => parts,
            None => (t, ""),
        };
        if int.is_empty()
            || frac.len() > 2
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let int: i64 = int.parse().map_err(|_| bad())?;
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            format!("{frac:0<2}").parse().map_err(|_| bad())?
        };
        let v = int * 100 + frac;
        Ok(Ge(if neg { -v } else { v }))
    }
}

impl Serialize for Ge {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Ge::whole(n)),
            Raw::Float(x) => {
                let h = (x * 100.0).round();
                if (h - x * 100.0).abs() > 1e-6 {
                    return Err(serde::de::Error::custom(format!(
                        "{x} is not a multiple of 0.01"
                    )));
                }
                Ok(Ge(h as i64))
            }
        }
    }
}

/// Area weight per component instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateWeightTable(pub BTreeMap<String, Ge>);

impl GateWeightTable {
    pub fn canonical() -> Self {
        let entries = [
            ("AND", 125),
            ("OR", 125),
            ("XOR", 200),
            ("NOT", 75),
            ("MUX2", 225),
            ("DFF", 425),
        ];
        GateWeightTable(
            entries
                .into_iter()
                .map(|(k, h)| (k.to_string(), Ge(h)))
                .collect(),
        )
    }

    pub fn get(&self, name: &str) -> Option<Ge> {
        self.0.get(name).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BillRow {
    pub label: String,
    pub component: String,
    pub multiplicity: u32,
    pub width: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_ge: Option<Ge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BillOfComponents {
    pub name: String,
    pub rows: Vec<BillRow>,
}

fn row(label: &str, component: &str, multiplicity: u32, width: u32, fixed: Option<i64>) -> BillRow {
    BillRow {
        label: label.to_string(),
        component: component.to_string(),
        multiplicity,
        width,
        fixed_ge: fixed.map(Ge::whole),
    }
}

impl BillOfComponents {
    /// Data path: state register, two 4-wide XORs, five 4-wide muxes, one
    /// S-box and a free rotation.
    pub fn canonical_data_path() -> Self {
        BillOfComponents {
            name: "data path".into(),
            rows: vec![
                row("64-Bit Register", "DFF", 64, 1, None),
                row("2 XOR", "XOR", 2, 4, None),
                row("5 MUX", "MUX2", 5, 4, None),
                row("1 SBOX", "SBOX", 1, 1, Some(24)),
                row("1 Shift", "SHIFT", 1, 1, Some(0)),
            ],
        }
    }

    /// Key path: key register, one 5-bit counter XOR, two 4-wide muxes and
    /// the control FSM.
    pub fn canonical_key_path() -> Self {
        BillOfComponents {
            name: "key path".into(),
            rows: vec![
                row("128-Bit Register", "DFF", 128, 1, None),
                row("1- 5 Bit XOR", "XOR", 1, 5, None),
                row("2 MUX", "MUX2", 2, 4, None),
                row("FSM", "FSM", 1, 1, Some(122)),
            ],
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCost {
    pub label: String,
    /// Arithmetic as printed, e.g. `64 * 4.25 = 272`.
    pub expression: String,
    pub ge: Ge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCost {
    pub name: String,
    pub rows: Vec<RowCost>,
    pub total: Ge,
}

fn row_cost(r: &BillRow, weights: &GateWeightTable) -> Result<RowCost, Error> {
    if r.multiplicity == 0 || r.width == 0 {
        return Err(Error::EmptyRow(r.label.clone()));
    }
    let weight = r
        .fixed_ge
        .or_else(|| weights.get(&r.component))
        .ok_or_else(|| Error::UnknownComponent(r.component.clone()))?;
    let ge = weight.times(r.multiplicity).times(r.width);
    let expression = if r.fixed_ge.is_some() && r.multiplicity == 1 && r.width == 1 {
        format!("{ge}")
    } else {
        let mut factors = vec![r.multiplicity.to_string()];
        if r.width != 1 {
            factors.push(r.width.to_string());
        }
        factors.push(weight.to_string());
        format!("{} = {ge}", factors.join(" * "))
    };
    Ok(RowCost {
        label: r.label.clone(),
        expression,
        ge,
    })
}

pub fn ge_total(bill: &BillOfComponents, weights: &GateWeightTable) -> Result<Ge, Error> {
    bill.rows
        .iter()
        .map(|r| row_cost(r, weights).map(|c| c.ge))
        .sum()
}

pub fn path_cost(bill: &BillOfComponents, weights: &GateWeightTable) -> Result<PathCost, Error> {
    let rows = bill
        .rows
        .iter()
        .map(|r| row_cost(r, weights))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PathCost {
        name: bill.name.clone(),
        total: rows.iter().map(|r| r.ge).sum(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeReport {
    pub data_path: PathCost,
    pub key_path: PathCost,
    pub grand_total: Ge,
}

pub fn ge_report_for(
    data: &BillOfComponents,
    key: &BillOfComponents,
    weights: &GateWeightTable,
) -> Result<GeReport, Error> {
    let data_path = path_cost(data, weights)?;
    let key_path = path_cost(key, weights)?;
    Ok(GeReport {
        grand_total: data_path.total + key_path.total,
        data_path,
        key_path,
    })
}

/// Report for the canonical bills and weights.
pub fn ge_report() -> GeReport {
    ge_report_for(
        &BillOfComponents::canonical_data_path(),
        &BillOfComponents::canonical_key_path(),
        &GateWeightTable::canonical(),
    )
    .expect("canonical bills only reference canonical components")
}

impl GeReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for path in [&self.data_path, &self.key_path] {
            let _ = writeln!(out, "{}", path.name.to_uppercase());
            for r in &path.rows {
                let _ = writeln!(out, "  {:<18} {:>20}", r.label, r.expression);
            }
            let _ = writeln!(out, "  {:<18} {:>20}", "TOTAL", path.total.to_string());
        }
        let _ = writeln!(
            out,
            "GRAND TOTAL {} + {} = {} GE",
            self.data_path.total, self.key_path.total, self.grand_total
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_weights() {
        let w = GateWeightTable::canonical();
        assert_eq!(w.get("AND"), Some("1.25".parse().unwrap()));
        assert_eq!(w.get("OR"), Some("1.25".parse().unwrap()));
        assert_eq!(w.get("XOR"), Some(Ge::whole(2)));
        assert_eq!(w.get("NOT"), Some("0.75".parse().unwrap()));
        assert_eq!(w.get("MUX2"), Some("2.25".parse().unwrap()));
        assert_eq!(w.get("DFF"), Some("4.25".parse().unwrap()));
    }

    #[test]
    fn canonical_rows_and_totals() {
        let r = ge_report();
        let data: Vec<i64> = r
            .data_path
            .rows
            .iter()
            .map(|c| c.ge.hundredths() / 100)
            .collect();
        assert_eq!(data, vec![272, 16, 45, 24, 0]);
        let key: Vec<i64> = r
            .key_path
            .rows
            .iter()
            .map(|c| c.ge.hundredths() / 100)
            .collect();
        assert_eq!(key, vec![544, 10, 18, 122]);
        assert!(r
            .data_path
            .rows
            .iter()
            .chain(&r.key_path.rows)
            .all(|c| c.ge.hundredths() % 100 == 0));
        assert_eq!(r.data_path.total, Ge::whole(357));
        assert_eq!(r.key_path.total, Ge::whole(694));
        assert_eq!(r.grand_total, Ge::whole(1051));
        assert_eq!(r.data_path.rows[0].expression, "64 * 4.25 = 272");
        assert_eq!(r.data_path.rows[1].expression, "2 * 4 * 2 = 16");
        assert_eq!(r.data_path.rows[2].expression, "5 * 4 * 2.25 = 45");
        assert_eq!(r.key_path.rows[1].expression, "1 * 5 * 2 = 10");
    }

    #[test]
    fn empty_bill_is_zero() {
        let bill = BillOfComponents {
            name: "empty".into(),
            rows: vec![],
        };
        assert_eq!(ge_total(&bill, &GateWeightTable::canonical()), Ok(Ge::ZERO));
    }

    #[test]
    fn unknown_component_is_an_error() {
        let bill = BillOfComponents {
            name: "x".into(),
            rows: vec![row("3 NAND", "NAND", 3, 1, None)],
        };
        assert_eq!(
            ge_total(&bill, &GateWeightTable::canonical()),
            Err(Error::UnknownComponent("NAND".into()))
        );
        let bill = BillOfComponents {
            name: "x".into(),
            rows: vec![row("none", "XOR", 0, 1, None)],
        };
        assert!(matches!(
            ge_total(&bill, &GateWeightTable::canonical()),
            Err(Error::EmptyRow(_))
        ));
    }

    #[test]
    fn quantity_parsing() {
        assert_eq!("4.25".parse::<Ge>().unwrap().hundredths(), 425);
        assert_eq!("4.5".parse::<Ge>().unwrap().hundredths(), 450);
        assert_eq!("24".parse::<Ge>().unwrap().hundredths(), 2400);
        assert_eq!(Ge::from_hundredths(450).to_string(), "4.5");
        assert_eq!(Ge::from_hundredths(425).to_string(), "4.25");
        for bad in ["", "1.234", "a", "1.", ".5"] {
            assert!(bad.parse::<Ge>().is_err(), "{bad}");
        }
    }

    #[test]
    fn bill_json_round_trip() {
        let bill = BillOfComponents::canonical_data_path();
        let text = serde_json::to_string(&bill).unwrap();
        assert_eq!(BillOfComponents::from_json(&text).unwrap(), bill);
        let numeric = r#"{"name":"n","rows":[{"label":"r","component":"DFF","multiplicity":2,"width":1},
            {"label":"s","component":"S","multiplicity":1,"width":1,"fixed_ge":24.5}]}"#;
        let bill = BillOfComponents::from_json(numeric).unwrap();
        assert_eq!(
            ge_total(&bill, &GateWeightTable::canonical()).unwrap(),
            "33".parse().unwrap()
        );
    }

    proptest! {
        #[test]
        fn total_is_order_independent(seed in any::<u64>()) {
            let mut rows = BillOfComponents::canonical_data_path().rows;
            rows.extend(BillOfComponents::canonical_key_path().rows);
            let mut s = seed;
            for i in (1..rows.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                rows.swap(i, (s >> 33) as usize % (i + 1));
            }
            let bill = BillOfComponents { name: "shuffled".into(), rows };
            prop_assert_eq!(ge_total(&bill, &GateWeightTable::canonical()).unwrap(), Ge::whole(1051));
        }
    }
}

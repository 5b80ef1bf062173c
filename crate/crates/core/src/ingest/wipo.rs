use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::Serialize;

use super::{ColumnMap, Delimited, ParseReport};
use crate::error::{Error, Result};

/// Aggregate technology groups over the 35 WIPO fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TechGroup {
    Electronics,
    IT,
    Instruments,
    Chemical,
    Pharma,
    Mechanical,
    Other,
}

use TechGroup::*;

/// Index `i` holds the group of WIPO field `i + 1`.
const FIELD_GROUPS: [TechGroup; 35] = [
    Electronics, // 1 Electrical machinery, apparatus, energy
    Electronics, // 2 Audio-visual technology
    Electronics, // 3 Telecommunications
    IT,          // 4 Digital communication
    Electronics, // 5 Basic communication processes
    IT,          // 6 Computer technology
    IT,          // 7 IT methods for management
    IT,          // 8 Semiconductors
    Instruments, // 9 Optics
    Instruments, // 10 Measurement
    Chemical,    // 11 Analysis of biological materials
    Instruments, // 12 Control
    Pharma,      // 13 Medical technology
    Chemical,    // 14 Organic fine chemistry
    Chemical,    // 15 Biotechnology
    Pharma,      // 16 Pharmaceuticals
    Chemical,    // 17 Macromolecular chemistry, polymers
    Chemical,    // 18 Food chemistry
    Chemical,    // 19 Basic materials chemistry
    Chemical,    // 20 Materials, metallurgy
    Chemical,    // 21 Surface technology, coating
    Chemical,    // 22 Micro-structural and nano-technology
    Chemical,    // 23 Chemical engineering
    Chemical,    // 24 Environmental technology
    Mechanical,  // 25 Handling
    Mechanical,  // 26 Machine tools
    Mechanical,  // 27 Engines, pumps, turbines
    Mechanical,  // 28 Textile and paper machines
    Mechanical,  // 29 Other special machines
    Mechanical,  // 30 Thermal processes and apparatus
    Mechanical,  // 31 Mechanical elements
    Mechanical,  // 32 Transport
    Other,       // 33 Furniture, games
    Other,       // 34 Other consumer goods
    Other,       // 35 Civil engineering
];

impl TechGroup {
    pub const ALL: [TechGroup; 7] = [Electronics, IT, Instruments, Chemical, Pharma, Mechanical, Other];

    pub fn from_field(field: u8) -> Option<TechGroup> {
        FIELD_GROUPS.get(usize::from(field).checked_sub(1)?).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Electronics => "Electronics",
            IT => "IT",
            Instruments => "Instruments",
            Chemical => "Chemical",
            Pharma => "Pharma",
            Mechanical => "Mechanical",
            Other => "other",
        }
    }
}

impl fmt::Display for TechGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TechGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TechGroup::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown technology group `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechAssignment {
    pub patent_id: String,
    pub wipo_field_id: u8,
    pub aggregate_group: TechGroup,
}

pub fn parse_wipo<R: Read>(source: R, source_name: &str, map: &ColumnMap) -> Result<(Vec<TechAssignment>, ParseReport)> {
    let reader = Delimited::open(source, source_name, map, &["wipo.patent", "wipo.field"], &[])?;
    let mut report = ParseReport::new(source_name);
    let mut out = Vec::new();
    reader.for_each_row(&mut report, |line, fields, report| {
        let (id, field) = (fields[0].unwrap_or(""), fields[1].unwrap_or(""));
        if id.is_empty() {
            return report.reject(line, "empty_id", "patent id is empty");
        }
        // PatentsView sometimes writes integral ids as "6.0".
        let parsed = field
            .strip_suffix(".0")
            .unwrap_or(field)
            .parse::<u8>()
            .ok()
            .and_then(|f| TechGroup::from_field(f).map(|g| (f, g)));
        match parsed {
            Some((wipo_field_id, aggregate_group)) => {
                report.rows_kept += 1;
                out.push(TechAssignment {
                    patent_id: id.to_string(),
                    wipo_field_id,
                    aggregate_group,
                });
            }
            None => report.reject(line, "field_out_of_range", format!("WIPO field `{field}` not in 1-35")),
        }
    })?;
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_mapping_anchors() {
        assert_eq!(TechGroup::from_field(6), Some(IT));
        assert_eq!(TechGroup::from_field(13), Some(Pharma));
        assert_eq!(TechGroup::from_field(35), Some(Other));
        assert_eq!(TechGroup::from_field(1), Some(Electronics));
        assert_eq!(TechGroup::from_field(11), Some(Chemical));
        assert_eq!(TechGroup::from_field(12), Some(Instruments));
        assert_eq!(TechGroup::from_field(32), Some(Mechanical));
        assert_eq!(TechGroup::from_field(0), None);
        assert_eq!(TechGroup::from_field(36), None);
    }

    #[test]
    fn group_sizes() {
        let count = |g| FIELD_GROUPS.iter().filter(|&&x| x == g).count();
        assert_eq!(
            [Electronics, IT, Instruments, Chemical, Pharma, Mechanical, Other].map(count),
            [4, 4, 3, 11, 2, 8, 3]
        );
    }

    #[test]
    fn multi_field_and_range_errors() {
        let text = "patent_id,wipo_field_id\n1,6\n1,13.0\n2,36\n3,x\n";
        let (rows, report) = parse_wipo(text.as_bytes(), "w", &ColumnMap::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].aggregate_group, Pharma);
        assert_eq!(report.dropped["field_out_of_range"], 2);
    }

    #[test]
    fn group_names_parse() {
        assert_eq!("it".parse::<TechGroup>().unwrap(), IT);
        assert_eq!("other".parse::<TechGroup>().unwrap(), Other);
        assert!("Biology".parse::<TechGroup>().is_err());
    }
}

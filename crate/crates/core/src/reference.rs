//! The small worked instance used throughout the tests and examples.

use crate::eval::{Chromosome, Gene};
use crate::instance::Instance;
use crate::patterns::{PatternId, PatternSet};

/// Instance document for `cwp000`: one beam type, four 5.95 m molds and one
/// 11.95 m mold over three periods.
pub const CWP000_JSON: &str = include_str!("../data/cwp000.json");

pub fn cwp000() -> Instance {
    Instance::parse(CWP000_JSON).expect("bundled instance is valid")
}

/// A best known plan for `cwp000` with objective 2.3: packing pattern 2 four
/// times and 6 twice, two 5.95 m bars from one new bar, two 11.95 m bars from
/// new bars and two 5.95 m bars from 6 m leftovers.
pub fn cwp000_optimum(pats: &PatternSet) -> Chromosome {
    let cut = |src, items: [u32; 2]| {
        pats.find_cutting(src, &items, &[0; 4])
            .expect("pattern exists in cwp000")
    };
    Chromosome::new(vec![
        gene(PatternId(2), 4),
        gene(PatternId(6), 2),
        gene(cut(3, [1, 0]), 2),
        gene(cut(0, [2, 0]), 1),
        gene(cut(0, [0, 1]), 2),
    ])
}

fn gene(pattern: PatternId, freq: u32) -> Gene {
    Gene { pattern, freq }
}

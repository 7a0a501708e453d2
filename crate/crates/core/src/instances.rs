//! The bundled instance catalog, the two-cell Chimera edge set it lives on,
//! and the rejection sampler for random instances with a target ground-state
//! degeneracy.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::IsingModel;

/// Site labels used by every catalog instance and by the generator.
pub const CATALOG_SITES: [u32; 16] = [
    296, 297, 298, 299, 300, 301, 302, 303, 304, 305, 306, 307, 308, 309, 310, 311,
];

const CATALOG_DATA: [(&str, usize, &str); 13] = [
    ("GSD-2", 2, include_str!("../data/gsd-2.json")),
    ("GSD-4", 4, include_str!("../data/gsd-4.json")),
    ("GSD-6", 6, include_str!("../data/gsd-6.json")),
    ("GSD-8", 8, include_str!("../data/gsd-8.json")),
    ("GSD-10", 10, include_str!("../data/gsd-10.json")),
    ("GSD-24", 24, include_str!("../data/gsd-24.json")),
    ("GSD-38", 38, include_str!("../data/gsd-38.json")),
    ("GSD-F-1", 1, include_str!("../data/gsd-f-1.json")),
    ("GSD-F-2", 2, include_str!("../data/gsd-f-2.json")),
    ("GSD-F-3", 3, include_str!("../data/gsd-f-3.json")),
    ("GSD-F-4", 4, include_str!("../data/gsd-f-4.json")),
    ("GSD-F-5", 5, include_str!("../data/gsd-f-5.json")),
    ("GSD-F-6", 6, include_str!("../data/gsd-f-6.json")),
];

/// One named 16-site instance from the bundled catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    /// Catalog name, e.g. "GSD-6".
    pub name: &'static str,
    /// The instance itself, on sites 296 through 311.
    pub model: IsingModel,
    /// Ground-state degeneracy the name advertises.
    pub declared_degeneracy: usize,
    /// Whether the instance carries local fields.
    pub has_fields: bool,
}

/// All 13 catalog entries, fieldless instances first.
pub fn catalog() -> Vec<CatalogEntry> {
    CATALOG_DATA
        .iter()
        .map(|&(name, declared_degeneracy, text)| {
            let model: IsingModel =
                serde_json::from_str(text).expect("bundled instance data parses");
            let has_fields = model.fields().next().is_some();
            CatalogEntry { name, model, declared_degeneracy, has_fields }
        })
        .collect()
}

/// Looks up one catalog entry by name, case-insensitively.
pub fn catalog_entry(name: &str) -> Result<CatalogEntry> {
    catalog()
        .into_iter()
        .find(|entry| entry.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownInstance(name.to_string()))
}

/// Edge set of a Chimera grid with the given cell dimensions, over qubit
/// indices starting at 0. Each cell is a complete bipartite graph on two
/// 4-qubit shores; the left shore couples vertically to the next row, the
/// right shore horizontally to the next column.
pub fn chimera_edges(rows: usize, cols: usize) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    let base = |r: usize, c: usize| (8 * (r * cols + c)) as u32;
    for r in 0..rows {
        for c in 0..cols {
            let cell = base(r, c);
            for k in 0..4u32 {
                for l in 4..8u32 {
                    edges.push((cell + k, cell + l));
                }
            }
            if c + 1 < cols {
                let right = base(r, c + 1);
                for l in 4..8u32 {
                    edges.push((cell + l, right + l));
                }
            }
            if r + 1 < rows {
                let below = base(r + 1, c);
                for k in 0..4u32 {
                    edges.push((cell + k, below + k));
                }
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// The fixed 36-edge set all catalog instances and generated instances use:
/// two Chimera cells side by side, shifted onto sites 296 through 311.
pub fn two_cell_chimera_edges() -> Vec<(u32, u32)> {
    let mut edges: Vec<(u32, u32)> = chimera_edges(1, 2)
        .into_iter()
        .map(|(a, b)| (a + 296, b + 296))
        .collect();
    edges.sort_unstable();
    edges
}

/// Draws a random instance on the two-cell edge set with couplings (and
/// fields, when enabled) uniform over {-1, +1}, and reports its ground-state
/// degeneracy. With a target degeneracy, redraws until the target is hit or
/// `max_tries` draws are exhausted. Couplings are drawn in sorted edge order,
/// then fields in ascending site order, so output is a pure function of the
/// RNG state.
pub fn generate_instance<R: Rng>(
    rng: &mut R,
    with_fields: bool,
    target_degeneracy: Option<usize>,
    max_tries: usize,
) -> Result<(IsingModel, usize)> {
    if max_tries == 0 {
        return Err(Error::InvalidArgument("max_tries must be at least 1".to_string()));
    }
    let edges = two_cell_chimera_edges();
    let draw = |rng: &mut R| -> Result<(IsingModel, usize)> {
        let sign = |rng: &mut R| if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let couplings = edges.iter().map(|&(a, b)| (a, b, sign(rng))).collect();
        let fields = if with_fields {
            CATALOG_SITES.iter().map(|&s| (s, sign(rng))).collect()
        } else {
            Vec::new()
        };
        let model = IsingModel::new(CATALOG_SITES.to_vec(), couplings, fields)?;
        let degeneracy = model.ground_states()?.degeneracy;
        Ok((model, degeneracy))
    };

    match target_degeneracy {
        None => draw(rng),
        Some(target) => {
            for _ in 0..max_tries {
                let (model, degeneracy) = draw(rng)?;
                if degeneracy == target {
                    return Ok((model, degeneracy));
                }
            }
            Err(Error::TargetDegeneracyNotFound { target, attempts: max_tries })
        }
    }
}

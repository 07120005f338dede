//! 3×3 grids, line-sum validation, the dihedral group of the square and the
//! three-parameter form of every 3×3 magic square.
//!
//! Cells are row-major with the letter layout
//!
//! ```text
//! a b c
//! d e f
//! g h i
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::Domain;
use crate::error::{Error, Result};

/// Cell indices of the 8 lines: 3 rows, 3 columns, main diagonal, anti-diagonal.
pub const SQUARE_LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

pub const SQUARE_LINE_NAMES: [&str; 8] = [
    "row 1",
    "row 2",
    "row 3",
    "column 1",
    "column 2",
    "column 3",
    "diagonal",
    "anti-diagonal",
];

/// Hourglass cells are `(a, b, c, e, g, h, i)`.
pub const HOURGLASS_LINES: [[usize; 3]; 5] =
    [[0, 1, 2], [4, 5, 6], [0, 3, 6], [1, 3, 5], [2, 3, 4]];

pub const HOURGLASS_LINE_NAMES: [&str; 5] = ["top row", "bottom row", "a-e-i", "b-e-h", "c-e-g"];

/// A 3×3 grid over some domain, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grid3<E> {
    pub cells: [E; 9],
}

impl<E: Clone> Grid3<E> {
    pub fn new(cells: [E; 9]) -> Self {
        Grid3 { cells }
    }

    pub fn from_rows(rows: [[E; 3]; 3]) -> Self {
        let [r0, r1, r2] = rows;
        let [a, b, c] = r0;
        let [d, e, f] = r1;
        let [g, h, i] = r2;
        Grid3 {
            cells: [a, b, c, d, e, f, g, h, i],
        }
    }

    pub fn from_slice(cells: &[E]) -> Result<Self> {
        let cells: [E; 9] = cells
            .to_vec()
            .try_into()
            .map_err(|v: Vec<E>| Error::CellCount {
                expected: 9,
                got: v.len(),
            })?;
        Ok(Grid3 { cells })
    }

    pub fn center(&self) -> &E {
        &self.cells[4]
    }

    pub fn rows(&self) -> [[E; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.cells[3 * r + c].clone()))
    }

    pub fn permuted(&self, perm: &[usize; 9]) -> Self {
        Grid3 {
            cells: std::array::from_fn(|k| self.cells[perm[k]].clone()),
        }
    }
}

/// The nine squared entries `(a², B, c², D, e², F, g², H, i²)` of a magic
/// square of squares over a finite carrier, as canonical encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SquareTuple(pub [u64; 9]);

impl SquareTuple {
    pub fn entries(&self) -> &[u64; 9] {
        &self.0
    }

    pub fn center(&self) -> u64 {
        self.0[4]
    }

    pub fn to_grid(&self) -> Grid3<u64> {
        Grid3::new(self.0)
    }

    pub fn permuted(&self, perm: &[usize; 9]) -> Self {
        SquareTuple(std::array::from_fn(|k| self.0[perm[k]]))
    }
}

/// Outcome of checking a grid (8 lines) or an hourglass (5 lines).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport<E> {
    pub line_sums: Vec<E>,
    /// The shared total when every line agrees.
    pub common_total: Option<E>,
    /// Size of the largest group of agreeing lines.
    pub sums_equal_count: usize,
    /// The value shared by that group (earliest line wins ties).
    pub modal_total: E,
    /// Lines whose sum differs from `modal_total`, as indices into `line_sums`.
    pub disagreeing_lines: Vec<usize>,
    pub distinct_entries: usize,
    pub all_entries_square: bool,
    pub is_magic_square_of_squares: bool,
}

fn report<D: Domain>(
    domain: &D,
    cells: &[D::Elem],
    lines: &[[usize; 3]],
) -> Result<ValidationReport<D::Elem>> {
    if let Some(bad) = cells.iter().find(|x| !domain.contains(x)) {
        return Err(Error::ForeignCell(domain.describe(bad)));
    }
    let line_sums: Vec<D::Elem> = lines
        .iter()
        .map(|&[x, y, z]| domain.add(&domain.add(&cells[x], &cells[y]), &cells[z]))
        .collect();

    let mut tally: BTreeMap<&D::Elem, (usize, usize)> = BTreeMap::new();
    for (idx, s) in line_sums.iter().enumerate() {
        tally.entry(s).or_insert((0, idx)).0 += 1;
    }
    let (modal_total, (sums_equal_count, _)) = tally
        .iter()
        .max_by(|(_, (ca, ia)), (_, (cb, ib))| ca.cmp(cb).then(ib.cmp(ia)))
        .map(|(s, v)| ((*s).clone(), *v))
        .expect("at least one line");
    let disagreeing_lines = line_sums
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != modal_total)
        .map(|(k, _)| k)
        .collect();

    let distinct_entries = cells.iter().collect::<BTreeSet<_>>().len();
    let all_entries_square = cells.iter().all(|x| domain.is_square(x));
    let all_equal = sums_equal_count == lines.len();
    Ok(ValidationReport {
        common_total: all_equal.then(|| modal_total.clone()),
        is_magic_square_of_squares: all_equal
            && distinct_entries == cells.len()
            && all_entries_square,
        line_sums,
        sums_equal_count,
        modal_total,
        disagreeing_lines,
        distinct_entries,
        all_entries_square,
    })
}

/// Checks the 8 line sums, distinctness and squareness of a 3×3 grid.
pub fn validate_square<D: Domain>(
    grid: &Grid3<D::Elem>,
    domain: &D,
) -> Result<ValidationReport<D::Elem>> {
    report(domain, &grid.cells, &SQUARE_LINES)
}

/// Checks the 5 hourglass sums of the cells `(a², b², c², e², g², h², i²)`.
pub fn validate_hourglass<D: Domain>(
    cells: &[D::Elem; 7],
    domain: &D,
) -> Result<ValidationReport<D::Elem>> {
    report(domain, cells, &HOURGLASS_LINES)
}

/// `(A, B, C)` of the parametrization `M(A, B, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamTriple<E> {
    pub a: E,
    pub b: E,
    pub c: E,
}

/// The magic square
///
/// ```text
/// C+A    C−A−B  C+B
/// C−A+B  C      C+A−B
/// C−B    C+A+B  C−A
/// ```
///
/// with every line summing to `3C`.
pub fn magic_from_params<D: Domain>(p: &ParamTriple<D::Elem>, domain: &D) -> Grid3<D::Elem> {
    let (a, b, c) = (&p.a, &p.b, &p.c);
    let add = |x: &D::Elem, y: &D::Elem| domain.add(x, y);
    let sub = |x: &D::Elem, y: &D::Elem| domain.sub(x, y);
    Grid3::new([
        add(c, a),
        sub(&sub(c, a), b),
        add(c, b),
        add(&sub(c, a), b),
        c.clone(),
        sub(&add(c, a), b),
        sub(c, b),
        add(&add(c, a), b),
        sub(c, a),
    ])
}

fn rotate(perm: &[usize; 9]) -> [usize; 9] {
    // 90° clockwise: new (r, c) takes old (2 − c, r)
    std::array::from_fn(|k| {
        let (r, c) = (k / 3, k % 3);
        perm[3 * (2 - c) + r]
    })
}

fn mirror(perm: &[usize; 9]) -> [usize; 9] {
    std::array::from_fn(|k| {
        let (r, c) = (k / 3, k % 3);
        perm[3 * r + (2 - c)]
    })
}

/// The 8 symmetries of the square as cell permutations, identity first.
pub fn dihedral_permutations() -> [[usize; 9]; 8] {
    let id: [usize; 9] = std::array::from_fn(|k| k);
    let mut out = [id; 8];
    for k in 1..4 {
        out[k] = rotate(&out[k - 1]);
    }
    for k in 0..4 {
        out[4 + k] = mirror(&out[k]);
    }
    out
}

/// Orbit of a tuple under the dihedral group of order 8.
pub fn dihedral_orbit(t: &SquareTuple) -> BTreeSet<SquareTuple> {
    dihedral_permutations()
        .iter()
        .map(|p| t.permuted(p))
        .collect()
}

/// Smallest element of the dihedral orbit; equal for tuples in the same class.
pub fn dihedral_canonical(t: &SquareTuple) -> SquareTuple {
    dihedral_permutations()
        .iter()
        .map(|p| t.permuted(p))
        .min()
        .expect("group is non-empty")
}

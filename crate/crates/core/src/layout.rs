//! Element placement: which element ids go into which module.
//!
//! The table has `n` rows (modules) and `K` columns. Cells are filled
//! column by column, top to bottom, writing each element id `n - m + 1`
//! times in a row before moving to the next id. The optimized layout reorders
//! the rows with `f(i)` and rotates each row so that every column position
//! holds all `R` ids.
//!
//! Rows and columns are 1-based throughout, matching element ids.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::LayoutError;
use crate::scheme::SchemeParams;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutTable {
    params: SchemeParams,
    rows: Vec<Vec<u32>>,
    optimized: bool,
}

impl LayoutTable {
    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Row at 1-based `position`.
    pub fn row(&self, position: u32) -> Option<&[u32]> {
        position
            .checked_sub(1)
            .and_then(|i| self.rows.get(i as usize))
            .map(Vec::as_slice)
    }

    pub fn is_optimized(&self) -> bool {
        self.optimized
    }

    /// Rows as `1: 1 2 4`, right-aligned.
    pub fn render_text(&self) -> String {
        let label_width = self.rows.len().to_string().len();
        let cell_width = self.params.element_count().to_string().len();
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{:>label_width$}:", i + 1);
            for id in row {
                let _ = write!(out, " {id:>cell_width$}");
            }
            out.push('\n');
        }
        out
    }

    /// Rows as a JSON array of arrays.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.rows)
    }
}

/// Constructive column-major fill.
pub fn build_table(params: SchemeParams) -> LayoutTable {
    let n = params.n() as usize;
    let k = params.elements_per_module() as usize;
    let copies = params.copies();
    let mut rows = vec![vec![0u32; k]; n];
    let mut element = 1;
    let mut written = 0;
    for column in 0..k {
        for row in rows.iter_mut() {
            row[column] = element;
            written += 1;
            if written == copies {
                written = 0;
                element += 1;
            }
        }
    }
    LayoutTable {
        params,
        rows,
        optimized: false,
    }
}

/// Closed form of [`build_table`]: the element id in cell (`row`, `column`).
pub fn element_at(params: SchemeParams, row: u32, column: u32) -> Result<u32, LayoutError> {
    let k = params.elements_per_module();
    if row == 0 || row > params.n() || column == 0 || column > k {
        return Err(LayoutError::OutOfRange {
            row,
            column,
            rows: params.n(),
            columns: k,
        });
    }
    Ok(cell(params, row, column))
}

fn cell(params: SchemeParams, row: u32, column: u32) -> u32 {
    let index = u64::from(column - 1) * u64::from(params.n()) + u64::from(row - 1);
    (index / u64::from(params.copies())) as u32 + 1
}

/// `order[i - 1]` is the old module index placed at new position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleOrdering {
    params: SchemeParams,
    order: Vec<u32>,
}

impl ModuleOrdering {
    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Old module index at 1-based new `position`.
    pub fn old_index(&self, position: u32) -> Option<u32> {
        position
            .checked_sub(1)
            .and_then(|i| self.order.get(i as usize))
            .copied()
    }
}

/// The renumbering `f(i) = ((n-m+1)(i-1) + 1 + floor((i-1)·gcd(n, m-1)/n)) mod n`,
/// with residue 0 standing for `n`.
pub fn optimize_ordering(params: SchemeParams) -> Result<ModuleOrdering, LayoutError> {
    let n = u64::from(params.n());
    let step = u64::from(params.copies());
    let g = u64::from(params.gcd());
    let mut seen = vec![false; n as usize];
    let mut order = Vec::with_capacity(n as usize);
    for i in 0..n {
        let residue = (step * i + 1 + i * g / n) % n;
        let old = if residue == 0 { n } else { residue };
        let slot = &mut seen[(old - 1) as usize];
        if *slot {
            return Err(LayoutError::UnsupportedScheme {
                n: params.n(),
                m: params.m(),
            });
        }
        *slot = true;
        order.push(old as u32);
    }
    Ok(ModuleOrdering { params, order })
}

/// Reorders the rows by `ordering` and rotates each so that new position `i`
/// starts with element `((i-1) mod R) + 1`.
pub fn apply_optimization(
    table: &LayoutTable,
    ordering: &ModuleOrdering,
) -> Result<LayoutTable, LayoutError> {
    if table.optimized {
        return Err(LayoutError::AlreadyOptimized);
    }
    if table.params != ordering.params {
        return Err(LayoutError::SchemeMismatch);
    }
    let rows = ordering
        .order
        .iter()
        .zip(1u32..)
        .map(|(&old, position)| {
            let mut row = table.rows[(old - 1) as usize].clone();
            row.sort_unstable();
            rotate_for(table.params, position, old, row)
        })
        .collect::<Result<_, _>>()?;
    Ok(LayoutTable {
        params: table.params,
        rows,
        optimized: true,
    })
}

fn rotate_for(
    params: SchemeParams,
    position: u32,
    old: u32,
    mut sorted_row: Vec<u32>,
) -> Result<Vec<u32>, LayoutError> {
    let start = (position - 1) % params.element_count() + 1;
    let at = sorted_row
        .binary_search(&start)
        .map_err(|_| LayoutError::Inconsistent {
            element: start,
            row: old,
        })?;
    sorted_row.rotate_left(at);
    Ok(sorted_row)
}

/// Row lookup without materialising the whole table. Used by the container
/// and codec, where `n` can reach 65535.
#[derive(Debug, Clone)]
pub struct EffectiveLayout {
    params: SchemeParams,
    ordering: Option<ModuleOrdering>,
}

impl EffectiveLayout {
    pub fn new(params: SchemeParams, optimized: bool) -> Result<Self, LayoutError> {
        let ordering = if optimized {
            Some(optimize_ordering(params)?)
        } else {
            None
        };
        Ok(EffectiveLayout { params, ordering })
    }

    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn is_optimized(&self) -> bool {
        self.ordering.is_some()
    }

    /// Element ids of the module at 1-based `position`, in payload order.
    pub fn row(&self, position: u32) -> Result<Vec<u32>, LayoutError> {
        let k = self.params.elements_per_module();
        let out_of_range = || LayoutError::OutOfRange {
            row: position,
            column: 1,
            rows: self.params.n(),
            columns: k,
        };
        if position == 0 || position > self.params.n() {
            return Err(out_of_range());
        }
        match &self.ordering {
            None => Ok((1..=k).map(|j| cell(self.params, position, j)).collect()),
            Some(ordering) => {
                let old = ordering.old_index(position).ok_or_else(out_of_range)?;
                // column-major fill makes every row ascending already
                let row = (1..=k).map(|j| cell(self.params, old, j)).collect();
                rotate_for(self.params, position, old, row)
            }
        }
    }

    pub fn table(&self) -> Result<LayoutTable, LayoutError> {
        let table = build_table(self.params);
        match &self.ordering {
            None => Ok(table),
            Some(ordering) => apply_optimization(&table, ordering),
        }
    }
}

fn window_covers(table: &LayoutTable, start: usize, len: usize, cyclic: bool) -> bool {
    let n = table.rows.len();
    let mut seen = BTreeSet::new();
    for offset in 0..len {
        let index = if cyclic {
            (start + offset) % n
        } else {
            start + offset
        };
        seen.extend(table.rows[index].iter().copied());
    }
    seen.len() == table.params.element_count() as usize
}

/// Whether every run of `len` consecutive rows covers all elements.
pub fn consecutive_windows_cover(table: &LayoutTable, len: u32, cyclic: bool) -> bool {
    let n = table.rows.len();
    let len = len as usize;
    if len == 0 || len > n {
        return false;
    }
    let starts = if cyclic { n } else { n - len + 1 };
    (0..starts).all(|start| window_covers(table, start, len, cyclic))
}

/// Smallest `d` such that every non-wrapping window of `d` consecutive rows
/// covers all elements. On an optimized table this equals `D`.
pub fn min_covering_consecutive(table: &LayoutTable) -> u32 {
    let n = table.params.n();
    (1..=n)
        .find(|&d| consecutive_windows_cover(table, d, false))
        .unwrap_or(n)
}

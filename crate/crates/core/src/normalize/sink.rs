//! Moving one atom from a row into the row below it.

use super::{AtomCell, Cell, Row};

#[derive(Clone, Debug)]
pub(super) enum Item {
    Wire(String),
    Atom(AtomCell),
}

impl Item {
    fn input_width(&self) -> usize {
        match self {
            Item::Wire(_) => 1,
            Item::Atom(c) => c.input.len(),
        }
    }

    fn output_width(&self) -> usize {
        match self {
            Item::Wire(_) => 1,
            Item::Atom(c) => c.output.len(),
        }
    }
}

pub(super) fn items(row: &Row) -> Vec<Item> {
    let mut out = Vec::new();
    for c in &row.cells {
        match c {
            Cell::Pad(a) => out.extend(a.iter().cloned().map(Item::Wire)),
            Cell::Atom(cell) => out.push(Item::Atom(cell.clone())),
        }
    }
    out
}

pub(super) fn from_items(items: Vec<Item>) -> Row {
    let mut cells: Vec<Cell> = Vec::new();
    for it in items {
        match it {
            Item::Wire(w) => match cells.last_mut() {
                Some(Cell::Pad(a)) => a.0.push(w),
                _ => cells.push(Cell::Pad(std::iter::once(w).collect())),
            },
            Item::Atom(c) => cells.push(Cell::Atom(c)),
        }
    }
    Row { cells }
}

/// Tries to move the leftmost movable atom of `upper` into `lower`.
/// Returns the rewritten pair, or `None` when nothing can move.
pub(super) fn sink_once(upper: &Row, lower: &Row) -> Option<(Row, Row)> {
    let up = items(upper);
    let low = items(lower);
    let starts: Vec<usize> = low
        .iter()
        .scan(0, |p, it| {
            let s = *p;
            *p += it.input_width();
            Some(s)
        })
        .collect();

    let mut o = 0;
    for (j, it) in up.iter().enumerate() {
        let Item::Atom(cell) = it else {
            o += 1;
            continue;
        };
        let k = cell.output.len();
        if let Some(new_low) = place(&low, &starts, cell, o, k) {
            let mut new_up = up.clone();
            new_up.splice(j..=j, cell.input.iter().cloned().map(Item::Wire));
            return Some((from_items(new_up), from_items(new_low)));
        }
        o += k;
    }
    None
}

fn place(low: &[Item], starts: &[usize], cell: &AtomCell, o: usize, k: usize) -> Option<Vec<Item>> {
    if k == 0 {
        let blocked =
            low.iter().zip(starts).any(|(it, &s)| matches!(it, Item::Atom(c) if s < o && o < s + c.input.len()));
        if blocked {
            return None;
        }
        let at = starts.iter().position(|&s| s >= o).unwrap_or(low.len());
        let mut out = low.to_vec();
        out.insert(at, Item::Atom(cell.clone()));
        return Some(out);
    }
    let a = low.iter().zip(starts).position(|(it, &s)| s == o && matches!(it, Item::Wire(_)))?;
    if a + k > low.len() || !low[a..a + k].iter().all(|it| matches!(it, Item::Wire(_))) {
        return None;
    }
    let mut out = low.to_vec();
    out.splice(a..a + k, [Item::Atom(cell.clone())]);
    Some(out)
}

/// Output width of a row, used to sanity-check rewritten pairs in debug builds.
pub(super) fn width_out(row: &Row) -> usize {
    items(row).iter().map(Item::output_width).sum()
}

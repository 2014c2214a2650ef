//! Valuable items and their geometric value bands.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::model::{Instance, ItemId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueBandTable {
    pub eps: f64,
    pub m: usize,
    pub ls_value: f64,
    /// `d = ε·LS/m`.
    pub threshold: f64,
    pub valuable: BTreeSet<ItemId>,
    /// Nonempty bands only, each sorted by weight then id.
    pub bands: BTreeMap<usize, Vec<ItemId>>,
}

/// `⌈log_{1-ε}(4ε/m)⌉`, at least 1.
pub fn band_count(eps: f64, m: usize) -> usize {
    let x = (4.0 * eps / m as f64).ln() / (1.0 - eps).ln();
    (x - 1e-12).ceil().max(1.0) as usize
}

/// Band `r >= 1` with `ratio ∈ ((1-ε)^r, (1-ε)^{r-1}]`; ratios above 1 map to band 1.
pub fn band_of(ratio: f64, eps: f64) -> usize {
    if ratio >= 1.0 {
        return 1;
    }
    let q = 1.0 - eps;
    let mut r = ((ratio.ln() / q.ln()).floor() as i64 + 1).max(1) as usize;
    while q.powi(r as i32) >= ratio {
        r += 1;
    }
    while r > 1 && q.powi(r as i32 - 1) < ratio {
        r -= 1;
    }
    r
}

impl ValueBandTable {
    pub fn band_count(&self) -> usize {
        band_count(self.eps, self.m)
    }

    pub fn band(&self, r: usize) -> &[ItemId] {
        self.bands.get(&r).map_or(&[], |v| v.as_slice())
    }
}

/// Valuable items `v(i) >= ε·LS/m` grouped by `v(i)/(4·LS)`. Bands past the
/// nominal count are kept so that every valuable item has a band.
pub fn build_value_bands(inst: &Instance, eps: f64, ls_value: f64) -> ValueBandTable {
    let m = inst.m();
    let mut table = ValueBandTable {
        eps,
        m,
        ls_value,
        threshold: 0.0,
        valuable: BTreeSet::new(),
        bands: BTreeMap::new(),
    };
    if !(ls_value > 0.0) {
        return table;
    }
    table.threshold = eps * ls_value / m as f64;
    let mut bands: BTreeMap<usize, Vec<(f64, ItemId)>> = BTreeMap::new();
    for it in inst.items() {
        if it.value >= table.threshold {
            table.valuable.insert(it.id);
            let r = band_of(it.value / (4.0 * ls_value), eps);
            bands.entry(r).or_default().push((it.weight, it.id));
        }
    }
    table.bands = bands
        .into_iter()
        .map(|(r, mut v)| {
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            (r, v.into_iter().map(|(_, id)| id).collect())
        })
        .collect();
    table
}

/// The `min(n, |G_r|)` lightest items of band `r`.
pub fn first_items(table: &ValueBandTable, r: usize, n: usize) -> BTreeSet<ItemId> {
    table.band(r).iter().take(n).copied().collect()
}

//! Witnesses for finite products of categories.
//!
//! Factor `s` is verified for `k^{T_s}` colors, `T_s` the number of
//! positions `hom(A_1, C_1) × … × hom(A_{s-1}, C_{s-1})`. A coloring of the
//! product is decoded from the last factor down: the colors along each
//! column are packed into one factor color, a monochromatic copy is found
//! there, and the column is fixed to one of its points.

use std::collections::HashMap;

use super::{check_colorings, require_witnessed, TransferError, TransferOptions, Verification};
use crate::fincat::{
    copy_system, enumerate_hom, verify_arrow_with, ArrowStats, Category, CopySystem, Product,
    MAX_COLORS,
};

/// A verified product witness with its decoding.
pub struct ProductArrow<C: Category> {
    product: Product<C>,
    pub a: Vec<C::Object>,
    pub b: Vec<C::Object>,
    pub c: Vec<C::Object>,
    /// Colors each factor arrow was verified for.
    pub factor_colors: Vec<u32>,
    pub factor_stats: Vec<ArrowStats>,
    pub k: u32,
    pub verification: Verification,
    pub colorings_checked: u128,
    systems: Vec<CopySystem<C::Morphism>>,
    /// `hom(A, C)` of the product in canonical order.
    positions: Vec<Vec<C::Morphism>>,
    /// Grid index (first factor most significant) of each position.
    grid_of: Vec<usize>,
    index: HashMap<Vec<C::Morphism>, usize>,
    ab: Vec<Vec<C::Morphism>>,
}

impl<C: Category + Clone> ProductArrow<C> {
    pub fn product(&self) -> &Product<C> {
        &self.product
    }

    /// `hom(A, C)` in the product; colorings are aligned with it.
    pub fn positions(&self) -> &[Vec<C::Morphism>] {
        &self.positions
    }

    /// A `w: B → C` with `w · hom(A, B)` monochromatic under `colors`,
    /// checked by composing in the product.
    pub fn decode(&self, colors: &[u32]) -> Result<(Vec<C::Morphism>, u32), TransferError> {
        let sizes: Vec<usize> = self.systems.iter().map(|s| s.positions().len()).collect();
        let mut grid = vec![0u32; colors.len()];
        for (pos, &g) in self.grid_of.iter().enumerate() {
            grid[g] = colors[pos];
        }
        let k = self.k as u64;
        let mut chosen = vec![None; sizes.len()];
        for s in (0..sizes.len()).rev() {
            let width = sizes[s];
            let rows = grid.len() / width;
            let packed: Vec<u32> = (0..width)
                .map(|e| {
                    let mut value = 0u64;
                    for j in (0..rows).rev() {
                        value = value * k + (grid[j * width + e] - 1) as u64;
                    }
                    value as u32 + 1
                })
                .collect();
            let copy = self.systems[s].monochromatic_copy(&packed).ok_or_else(|| {
                TransferError::DecodingFailed(format!("factor {} has no monochromatic copy", s + 1))
            })?;
            let fixed = self.systems[s].copies()[copy][0] as usize;
            grid = (0..rows).map(|j| grid[j * width + fixed]).collect();
            chosen[s] = Some(self.systems[s].witness(copy).clone());
        }
        let w: Vec<C::Morphism> = chosen.into_iter().map(|m| m.expect("set above")).collect();
        let color = self.check_copy(&w, colors)?;
        Ok((w, color))
    }

    fn check_copy(&self, w: &[C::Morphism], colors: &[u32]) -> Result<u32, TransferError> {
        let mut color = None;
        let mut f = vec![0usize; self.ab.len()];
        loop {
            let tuple: Vec<C::Morphism> = f
                .iter()
                .enumerate()
                .map(|(s, &i)| self.ab[s][i].clone())
                .collect();
            let g = self.product.compose(&w.to_vec(), &tuple)?;
            let c = colors[*self.index.get(&g).ok_or_else(|| {
                TransferError::DecodingFailed(format!("{g:?} is not in hom(A, C)"))
            })?];
            match color {
                None => color = Some(c),
                Some(prev) if prev != c => {
                    return Err(TransferError::DecodingFailed(format!(
                        "{w:?} meets colors {prev} and {c}"
                    )))
                }
                Some(_) => {}
            }
            // odometer over hom(A_1, B_1) × … × hom(A_n, B_n)
            let mut s = f.len();
            loop {
                if s == 0 {
                    return Ok(color.expect("hom(A, B) is nonempty"));
                }
                s -= 1;
                f[s] += 1;
                if f[s] < self.ab[s].len() {
                    break;
                }
                f[s] = 0;
            }
        }
    }
}

/// Colors needed by each factor for a product `k`-coloring.
pub fn factor_color_counts(k: u32, positions: &[usize]) -> Result<Vec<u32>, TransferError> {
    let mut out = Vec::with_capacity(positions.len());
    let mut cells: u128 = 1;
    for &t in positions {
        let colors = (k as u128)
            .checked_pow(cells.min(u32::MAX as u128) as u32)
            .filter(|&c| c <= MAX_COLORS as u128)
            .ok_or(TransferError::TooManyColors {
                colors: (k as u128).saturating_pow(cells.min(u32::MAX as u128) as u32),
            })?;
        out.push(colors as u32);
        cells = cells.saturating_mul(t as u128);
    }
    Ok(out)
}

/// Verifies each `c_s → (b_s)^{a_s}` for its packed color count and checks
/// the decoding on colorings of the product.
pub fn product_arrow<C: Category + Clone>(
    cats: &[C],
    a: &[C::Object],
    b: &[C::Object],
    c: &[C::Object],
    k: u32,
    opts: &TransferOptions,
) -> Result<ProductArrow<C>, TransferError> {
    let n = cats.len();
    if a.len() != n || b.len() != n || c.len() != n || n == 0 {
        return Err(TransferError::ArityMismatch {
            expected: n,
            found: a.len().min(b.len()).min(c.len()),
        });
    }
    let limits = &opts.limits;
    let mut systems = Vec::with_capacity(n);
    let mut ab = Vec::with_capacity(n);
    for s in 0..n {
        systems.push(copy_system(&cats[s], &a[s], &b[s], &c[s], limits)?);
        ab.push(enumerate_hom(&cats[s], &a[s], &b[s], limits.hom_cap)?);
    }
    let sizes: Vec<usize> = systems.iter().map(|s| s.positions().len()).collect();
    let factor_colors = factor_color_counts(k, &sizes)?;
    let mut factor_stats = Vec::with_capacity(n);
    for s in 0..n {
        let report = verify_arrow_with(&systems[s], factor_colors[s], opts.mode, limits)?;
        require_witnessed(&report, &format!("product factor {}", s + 1))?;
        factor_stats.push(report.stats);
    }

    let product = Product::new(cats.to_vec());
    let (a, b, c) = (a.to_vec(), b.to_vec(), c.to_vec());
    let positions = enumerate_hom(&product, &a, &c, limits.hom_cap)?;
    let factor_index: Vec<HashMap<&C::Morphism, usize>> = systems
        .iter()
        .map(|sys| {
            sys.positions()
                .iter()
                .enumerate()
                .map(|(i, f)| (f, i))
                .collect()
        })
        .collect();
    let grid_of = positions
        .iter()
        .map(|tuple| {
            tuple
                .iter()
                .enumerate()
                .fold(0usize, |acc, (s, f)| acc * sizes[s] + factor_index[s][f])
        })
        .collect();
    let index = positions
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();

    let mut out = ProductArrow {
        product,
        a,
        b,
        c,
        factor_colors,
        factor_stats,
        k,
        verification: Verification::Exhaustive,
        colorings_checked: 0,
        systems,
        positions,
        grid_of,
        index,
        ab,
    };
    let (verification, checked) = check_colorings(out.positions.len(), k, opts, |colors| {
        out.decode(colors).map(|_| ())
    })?;
    out.verification = verification;
    out.colorings_checked = checked;
    Ok(out)
}

//! Gap sets and their statistics: for a form anisotropic at exactly one
//! prime `p`, the gap set collects the integers outside the zero class mod
//! `p` that the form fails to represent. This module computes bounded gap
//! sets, per-residue-class counts, the normalized `alpha` ratio
//! (`gaps / (p ln p)`, natural log), a heuristic universality estimate, and
//! the two bulk scans over form families.

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::is_prime;
use crate::form::Form;
use crate::local::{anisotropic_places, spinor_safe};
use crate::sieve::{sieve_all, BlockPlan, SieveError};

#[derive(Debug, Error)]
pub enum GapsError {
    #[error("{form} is anisotropic at {places:?}, not at exactly one prime")]
    NotSingleAnisotropic { form: Form, places: Vec<u64> },
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// Bounded gap set of a form anisotropic exactly at `p`, with statistics.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub form: Form,
    pub p: u64,
    pub bound: u64,
    /// Gaps in `[0, bound]`, ascending; never contains multiples of `p`.
    pub gaps: Vec<u64>,
    /// Count of gaps per residue class, index `l - 1` for `l` in `1..p`.
    pub class_counts: Vec<u64>,
    /// `gaps / (p ln p)`.
    pub alpha: f64,
    /// Squarefree discriminant; when false the gap set may never stabilize.
    pub spinor_safe: bool,
}

impl GapReport {
    /// Gap count in the class of `l` (1 <= l < p).
    pub fn class_count(&self, l: u64) -> u64 {
        self.class_counts[(l - 1) as usize]
    }
}

/// The normalized gap-count statistic `count / (p ln p)`, natural log.
pub fn alpha_statistic(count: u64, p: u64) -> f64 {
    count as f64 / (p as f64 * (p as f64).ln())
}

fn single_anisotropic_place(form: &Form) -> Result<u64, GapsError> {
    let places = anisotropic_places(form);
    if places.len() == 1 {
        Ok(places[0])
    } else {
        Err(GapsError::NotSingleAnisotropic {
            form: *form,
            places,
        })
    }
}

fn scan_gaps(
    form: &Form,
    p: u64,
    bound: u64,
    plan: &BlockPlan,
    keep_list: bool,
) -> Result<(Vec<u64>, Vec<u64>), SieveError> {
    let bitmap = sieve_all(form, bound, plan)?;
    let mut gaps = Vec::new();
    let mut class_counts = vec![0u64; (p - 1) as usize];
    for n in bitmap.unrepresented() {
        let r = n % p;
        if r == 0 {
            continue;
        }
        class_counts[(r - 1) as usize] += 1;
        if keep_list {
            gaps.push(n);
        }
    }
    Ok((gaps, class_counts))
}

/// Exact gap set of the form over `[0, bound]` with class counts and the
/// alpha statistic. Rejects forms not anisotropic at exactly `{p}`.
pub fn gap_report(
    form: &Form,
    p: u64,
    bound: u64,
    plan: &BlockPlan,
) -> Result<GapReport, GapsError> {
    let detected = single_anisotropic_place(form)?;
    if detected != p {
        return Err(GapsError::NotSingleAnisotropic {
            form: *form,
            places: vec![detected],
        });
    }
    let (gaps, class_counts) = scan_gaps(form, p, bound, plan, true)?;
    let total: u64 = class_counts.iter().sum();
    debug_assert_eq!(total as usize, gaps.len());
    Ok(GapReport {
        form: *form,
        p,
        bound,
        gaps,
        class_counts,
        alpha: alpha_statistic(total, p),
        spinor_safe: spinor_safe(form),
    })
}

/// Like [`gap_report`] but without materializing the gap list; returns
/// `(total, class_counts)`.
pub fn gap_class_counts(
    form: &Form,
    p: u64,
    bound: u64,
    plan: &BlockPlan,
) -> Result<(u64, Vec<u64>), GapsError> {
    let detected = single_anisotropic_place(form)?;
    if detected != p {
        return Err(GapsError::NotSingleAnisotropic {
            form: *form,
            places: vec![detected],
        });
    }
    let (_, class_counts) = scan_gaps(form, p, bound, plan, false)?;
    let total = class_counts.iter().sum();
    Ok((total, class_counts))
}

/// Heuristic estimate under an equidistribution assumption that is known
/// to be imperfect: the probability that no gap lands in a fixed nonzero
/// class is `(1 - 1/(p-1))^(alpha p ln p)`, and the expected number of
/// gap-free classes is `p - 1` times that. Never used as a correctness
/// gate anywhere in this crate.
pub fn expected_universal_count(p: u64, alpha: f64) -> (f64, f64) {
    assert!(p >= 3, "expected_universal_count requires p >= 3");
    assert!(alpha >= 0.0, "alpha must be nonnegative");
    let pf = p as f64;
    let per_class = (1.0 - 1.0 / (pf - 1.0)).powf(alpha * pf * pf.ln());
    (per_class, (pf - 1.0) * per_class)
}

/// The three one-parameter form families tracked separately by the scans.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    OneOneP,
    OneTwoP,
    OneThreeP,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::OneOneP, Family::OneTwoP, Family::OneThreeP];

    pub fn label(&self) -> &'static str {
        match self {
            Family::OneOneP => "1,1,p",
            Family::OneTwoP => "1,2,p",
            Family::OneThreeP => "1,3,p",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.trim() {
            "1,1,p" => Some(Family::OneOneP),
            "1,2,p" => Some(Family::OneTwoP),
            "1,3,p" => Some(Family::OneThreeP),
            _ => None,
        }
    }

    pub fn second_coefficient(&self) -> u64 {
        match self {
            Family::OneOneP => 1,
            Family::OneTwoP => 2,
            Family::OneThreeP => 3,
        }
    }

    /// The family member at `p` (coefficients re-sorted for small `p`).
    pub fn form_at(&self, p: u64) -> Form {
        Form::new(1, self.second_coefficient(), p).expect("family coefficients are positive")
    }

    /// True iff `form` is this family's member at `p`.
    pub fn matches(&self, form: &Form, p: u64) -> bool {
        *form == self.form_at(p)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One (p, l) cell of the per-class gap histogram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HistogramRow {
    pub family: Family,
    pub p: u64,
    pub l: u64,
    pub bound: u64,
    /// Number of gaps in the class of `l` up to the bound.
    pub m: u64,
}

/// Result of scanning a family over a prime range.
#[derive(Clone, Debug)]
pub struct FamilyScan {
    pub family: Family,
    pub multiplier: u64,
    /// Rows ordered by (p, l).
    pub rows: Vec<HistogramRow>,
    /// Primes in range whose family member is not anisotropic exactly there.
    pub skipped: Vec<u64>,
}

impl FamilyScan {
    /// (p, l) pairs with `m = 0`: the candidates at this bound.
    pub fn zero_class_pairs(&self) -> Vec<(u64, u64)> {
        self.rows
            .iter()
            .filter(|r| r.m == 0)
            .map(|r| (r.p, r.l))
            .collect()
    }
}

/// For every admissible prime in `[p_min, p_max]`, the per-class gap counts
/// of the family member at bound `multiplier * p`. Primes where the member
/// is not anisotropic exactly at `p` are skipped and reported.
pub fn scan_family(
    family: Family,
    p_min: u64,
    p_max: u64,
    multiplier: u64,
    plan: &BlockPlan,
) -> Result<FamilyScan, GapsError> {
    let mut admissible = Vec::new();
    let mut skipped = Vec::new();
    for p in p_min.max(2)..=p_max {
        if !is_prime(p) {
            continue;
        }
        let form = family.form_at(p);
        if anisotropic_places(&form) == vec![p] {
            admissible.push(p);
        } else {
            skipped.push(p);
        }
    }
    let per_prime: Vec<(u64, Vec<u64>)> = admissible
        .par_iter()
        .map(|&p| {
            let form = family.form_at(p);
            let bound = multiplier * p;
            let (_, counts) = gap_class_counts(&form, p, bound, plan)?;
            Ok((p, counts))
        })
        .collect::<Result<_, GapsError>>()?;
    let mut rows = Vec::new();
    for (p, counts) in per_prime {
        for l in 1..p {
            rows.push(HistogramRow {
                family,
                p,
                l,
                bound: multiplier * p,
                m: counts[(l - 1) as usize],
            });
        }
    }
    Ok(FamilyScan {
        family,
        multiplier,
        rows,
        skipped,
    })
}

/// One surveyed form with its bounded gap count and alpha ratio.
#[derive(Clone, Copy, Debug)]
pub struct AlphaRow {
    pub form: Form,
    pub p: u64,
    pub bound: u64,
    pub gap_count: u64,
    pub alpha: f64,
    pub spinor_safe: bool,
}

impl AlphaRow {
    /// Rows past this ratio are reported with a truncation marker.
    pub fn truncated(&self) -> bool {
        self.alpha > 100.0
    }
}

/// Surveys every form with squarefree sorted coefficients, anisotropic at
/// exactly one prime `p <= p_max`, and discriminant below
/// `disc_multiplier * p`. The alpha ratio is a lower estimate computed from
/// the gap count at bound `gap_bound_multiplier * p`. Rows are ordered by
/// `(p, a, b, c)`.
pub fn alpha_survey(
    p_max: u64,
    disc_multiplier: u64,
    gap_bound_multiplier: u64,
    plan: &BlockPlan,
) -> Result<Vec<AlphaRow>, GapsError> {
    let disc_cap = disc_multiplier * p_max;
    let mut selected: Vec<(u64, Form)> = Vec::new();
    let mut a = 1u64;
    while a * a * a < disc_cap {
        if !crate::arith::is_squarefree(a) {
            a += 1;
            continue;
        }
        let mut b = a;
        while a * b * b < disc_cap {
            if !crate::arith::is_squarefree(b) {
                b += 1;
                continue;
            }
            let mut c = b;
            while a * b * c < disc_cap {
                if crate::arith::is_squarefree(c) {
                    let form = Form::new(a, b, c).expect("positive coefficients");
                    let places = anisotropic_places(&form);
                    if let [p] = places[..] {
                        if p <= p_max && form.discriminant() < disc_multiplier * p {
                            selected.push((p, form));
                        }
                    }
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    selected.sort_by_key(|&(p, form)| (p, form));
    selected
        .par_iter()
        .map(|&(p, form)| {
            let bound = gap_bound_multiplier * p;
            let (count, _) = gap_class_counts(&form, p, bound, plan)?;
            Ok(AlphaRow {
                form,
                p,
                bound,
                gap_count: count,
                alpha: alpha_statistic(count, p),
                spinor_safe: spinor_safe(&form),
            })
        })
        .collect()
}

/// Formats with the given number of significant digits, plain decimal.
pub fn format_significant(x: f64, digits: u32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV emission for the alpha survey: columns
/// `a,b,c,p,bound,gap_count,alpha,spinor_safe`; alpha carries six
/// significant digits, or the literal `>100` truncation marker.
pub fn write_alpha_csv<W: Write>(rows: &[AlphaRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["a", "b", "c", "p", "bound", "gap_count", "alpha", "spinor_safe"])?;
    for r in rows {
        let alpha = if r.truncated() {
            ">100".to_string()
        } else {
            format_significant(r.alpha, 6)
        };
        out.write_record([
            r.form.a().to_string(),
            r.form.b().to_string(),
            r.form.c().to_string(),
            r.p.to_string(),
            r.bound.to_string(),
            r.gap_count.to_string(),
            alpha,
            r.spinor_safe.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// CSV emission for family scans: columns `family,p,l,bound,m`.
pub fn write_scan_csv<W: Write>(rows: &[HistogramRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["family", "p", "l", "bound", "m"])?;
    for r in rows {
        out.write_record([
            r.family.label().to_string(),
            r.p.to_string(),
            r.l.to_string(),
            r.bound.to_string(),
            r.m.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// CSV emission for a gap list: columns `n,l` (gap and its class mod p).
pub fn write_gaps_csv<W: Write>(report: &GapReport, w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "l"])?;
    for &n in &report.gaps {
        out.write_record([n.to_string(), (n % report.p).to_string()])?;
    }
    out.flush()?;
    Ok(())
}

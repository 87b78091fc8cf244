use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;

use super::{PreparedZeta, Rect, SpectrumEntry, ZetaError, ZetaTruncation};

const GL_ORDER: usize = 16;
const START_PANELS: usize = 2;
const MAX_PANELS: usize = 1 << 14;
/// Per-edge change between successive panel doublings, in units of winding.
const EDGE_TOL: f64 = 1e-6;
/// Largest accepted distance from the nearest integer.
pub const COUNT_RESIDUAL_TOL: f64 = 1e-3;
/// A zero is "on the contour" when its distance to an edge is below this
/// fraction of the shorter side.
const CONTOUR_CLEARANCE: f64 = 1e-3;

fn gl_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(GL_ORDER.try_into().unwrap())
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// Result of one argument-principle integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCount {
    pub count: i64,
    /// `(1 / 2 pi i) ∮ Z'/Z ds` before rounding.
    pub raw: Complex64,
    pub residual: f64,
}

/// Number of zeros of the truncated zeta function inside `rect`, counted
/// with multiplicity.
pub fn count_zeros(
    spectrum: &[SpectrumEntry],
    rect: Rect,
    trunc: ZetaTruncation,
) -> Result<ZeroCount, ZetaError> {
    rect.check()?;
    count_zeros_prepared(&PreparedZeta::new(spectrum, trunc), rect)
}

pub fn count_zeros_prepared(zeta: &PreparedZeta, rect: Rect) -> Result<ZeroCount, ZetaError> {
    rect.check()?;
    if zeta.is_empty() {
        return Ok(ZeroCount {
            count: 0,
            raw: Complex64::new(0.0, 0.0),
            residual: 0.0,
        });
    }
    let c = [
        Complex64::new(rect.re_min, rect.im_min),
        Complex64::new(rect.re_max, rect.im_min),
        Complex64::new(rect.re_max, rect.im_max),
        Complex64::new(rect.re_min, rect.im_max),
    ];
    let clearance = CONTOUR_CLEARANCE * rect.width().min(rect.height());
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        if let Some((near, d)) = zeta.nearest_zero_to_segment(c[i], c[(i + 1) % 4]) {
            if d < clearance {
                return Err(ZetaError::ZeroOnContour {
                    near,
                    suggestion: rect.perturbed(0.01),
                });
            }
        }
    }
    for i in 0..4 {
        total += edge_integral(zeta, c[i], c[(i + 1) % 4], &rect)?;
    }
    let raw = total / Complex64::new(0.0, 2.0 * PI);
    let count = raw.re.round() as i64;
    let residual = (raw - count as f64).norm();
    if residual >= COUNT_RESIDUAL_TOL {
        return Err(ZetaError::QuadratureDiverged { residual });
    }
    Ok(ZeroCount {
        count,
        raw,
        residual,
    })
}

fn edge_integral(
    zeta: &PreparedZeta,
    a: Complex64,
    b: Complex64,
    rect: &Rect,
) -> Result<Complex64, ZetaError> {
    let on_contour = |near: Complex64| ZetaError::ZeroOnContour {
        near,
        suggestion: rect.perturbed(0.01),
    };
    let composite = |panels: usize| -> Result<Complex64, ZetaError> {
        let h = (b - a) / panels as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + h * (p as f64 + 0.5);
            for &(x, w) in gl_rule() {
                let s = mid + h * (0.5 * x);
                let f = match zeta.log_derivative(s) {
                    Ok(f) => f,
                    Err(ZetaError::FactorVanished { .. }) => return Err(on_contour(s)),
                    Err(e) => return Err(e),
                };
                sum += f * (0.5 * w);
            }
        }
        Ok(sum * h)
    };
    let mut panels = START_PANELS;
    let mut prev = composite(panels)?;
    loop {
        panels *= 2;
        let next = composite(panels)?;
        if (next - prev).norm() < EDGE_TOL * 2.0 * PI {
            return Ok(next);
        }
        if panels >= MAX_PANELS {
            return Err(ZetaError::QuadratureDiverged {
                residual: (next - prev).norm() / (2.0 * PI),
            });
        }
        prev = next;
    }
}

/// A localized zero cluster: the center of a cell smaller than the
/// requested resolution and the number of zeros inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocatedZero {
    pub s: Complex64,
    pub multiplicity: i64,
}

/// Split positions tried in turn; offset so that cell edges avoid the
/// rational lattices typical of zero sets.
const SPLITS: [f64; 6] = [0.5, 0.41, 0.59, 0.33, 0.67, 0.25];
const SPLIT_OFFSET: f64 = (SQRT_2 - 1.0) * 1e-2;

/// Recursive bisection of `rect` until every cell containing zeros has
/// diameter below `resolution`. Results are sorted by real, then imaginary
/// part.
pub fn scan_zeros(
    spectrum: &[SpectrumEntry],
    rect: Rect,
    trunc: ZetaTruncation,
    resolution: f64,
) -> Result<Vec<LocatedZero>, ZetaError> {
    if !(resolution > 0.0) {
        return Err(ZetaError::InvalidResolution);
    }
    rect.check()?;
    let zeta = PreparedZeta::new(spectrum, trunc);
    let mut out = Vec::new();
    if zeta.is_empty() {
        return Ok(out);
    }
    let top = count_zeros_prepared(&zeta, rect)?;
    let mut stack = vec![(rect, top.count)];
    while let Some((cell, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if cell.diameter() < resolution {
            out.push(LocatedZero {
                s: cell.center(),
                multiplicity: count,
            });
            continue;
        }
        let children = split_cell(&zeta, &cell, count)?;
        stack.extend(children.into_iter().filter(|c| c.1 > 0));
    }
    out.sort_by(|a, b| a.s.re.total_cmp(&b.s.re).then(a.s.im.total_cmp(&b.s.im)));
    Ok(out)
}

fn split_cell(zeta: &PreparedZeta, cell: &Rect, count: i64) -> Result<[(Rect, i64); 2], ZetaError> {
    let mut last_err = None;
    for f in SPLITS {
        let t = f + SPLIT_OFFSET;
        let (lo, hi) = if cell.width() >= cell.height() {
            let x = cell.re_min + t * cell.width();
            (Rect { re_max: x, ..*cell }, Rect { re_min: x, ..*cell })
        } else {
            let y = cell.im_min + t * cell.height();
            (Rect { im_max: y, ..*cell }, Rect { im_min: y, ..*cell })
        };
        match (
            count_zeros_prepared(zeta, lo),
            count_zeros_prepared(zeta, hi),
        ) {
            (Ok(a), Ok(b)) if a.count + b.count == count => {
                return Ok([(lo, a.count), (hi, b.count)])
            }
            (Ok(_), Ok(_)) => last_err = Some(ZetaError::QuadratureDiverged { residual: 1.0 }),
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one split tried"))
}

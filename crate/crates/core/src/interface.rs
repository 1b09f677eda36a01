//! Parsers for the textual inputs accepted by the command line.

use crate::config::ChannelConfig;
use crate::error::{Error, Result};

/// Upper bound on grid sizes accepted from text.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses `K0,K1,...,Kn`, optionally wrapped in brackets, e.g. `2,6,8,4` or `[2, 6, 8, 4]`.
pub fn parse_dims(text: &str) -> Result<ChannelConfig> {
    let trimmed = text.trim();
    let inner = match (trimmed.strip_prefix('['), trimmed.strip_suffix(']')) {
        (Some(_), Some(_)) => &trimmed[1..trimmed.len() - 1],
        (None, None) => trimmed,
        _ => return Err(Error::Parameter(format!("unbalanced brackets in dims '{text}'"))),
    };
    let dims = inner
        .split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<u32>()
                .map_err(|_| Error::Parameter(format!("dimension '{part}' is not a positive integer")))
        })
        .collect::<Result<Vec<u32>>>()?;
    ChannelConfig::new(dims)
}

/// Parses `start:stop:count` into `count` evenly spaced points including
/// both ends, or a single number into a one-point grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let number = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("'{s}' is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parameter(format!("grid value '{s}' is not finite")))
        }
    };
    match parts.as_slice() {
        [single] => Ok(vec![number(single)?]),
        [start, stop, count] => {
            let (start, stop) = (number(start)?, number(stop)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("grid count '{count}' is not an integer")))?;
            if count == 0 || count > MAX_GRID_POINTS {
                return Err(Error::Parameter(format!(
                    "grid count must lie in 1..={MAX_GRID_POINTS}, got {count}"
                )));
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let last = (count - 1) as f64;
            let step = (stop - start) / last;
            let (lo, hi) = (start.min(stop), start.max(stop));
            let point = |i: usize| {
                let t = i as f64 / last;
                // The span overflows only when the ends have opposite signs,
                // where the weighted form cannot.
                let v = if step.is_finite() {
                    start + step * i as f64
                } else {
                    start * (1.0 - t) + stop * t
                };
                v.clamp(lo, hi)
            };
            Ok((0..count)
                .map(|i| if i + 1 == count { stop } else { point(i) })
                .collect())
        }
        _ => Err(Error::Parameter(format!(
            "grid '{text}' must be a number or start:stop:count"
        ))),
    }
}

/// Parses a code rate `S/T` (or a bare `S`, meaning `S/S`) into `(S, T)`.
pub fn parse_rate(text: &str) -> Result<(u32, u32)> {
    let int = |s: &str| -> Result<u32> {
        match s.trim().parse::<u32>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::Parameter(format!("'{s}' is not a positive integer"))),
        }
    };
    let (s, t) = match text.split_once('/') {
        Some((s, t)) => (int(s)?, int(t)?),
        None => {
            let s = int(text)?;
            (s, s)
        }
    };
    if s > t {
        return Err(Error::Parameter(format!("code rate {s}/{t} exceeds 1")));
    }
    Ok((s, t))
}

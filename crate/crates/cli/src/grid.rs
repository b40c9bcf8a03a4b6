//! τ grid specifications on the command line.
//!
//! `LO:HI:N` or `LO:HI:Nlin` gives evenly spaced values, `LO:HI:Nlog`
//! geometric ones; a plain comma-separated list is taken as is.

use enclosure::probe::{geometric_grid, linear_grid};

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected LO:HI:N[log|lin], got '{spec}'"));
        }
        let lo = parse_num(parts[0])?;
        let hi = parse_num(parts[1])?;
        let (count, log) = match parts[2].strip_suffix("log") {
            Some(c) => (c, true),
            None => (parts[2].strip_suffix("lin").unwrap_or(parts[2]), false),
        };
        let n: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("bad point count '{count}' in '{spec}'"))?;
        if n == 0 {
            return Err("grid needs at least one point".into());
        }
        if !(lo > 0.0 && hi >= lo) || (n > 1 && hi == lo) {
            return Err(format!("need 0 < LO < HI, got {lo} and {hi}"));
        }
        if log {
            geometric_grid(lo, hi, n)
        } else {
            linear_grid(lo, hi, n)
        }
    } else {
        spec.split(',').map(parse_num).collect::<Result<Vec<_>, _>>()?
    };
    if grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err("tau values must be positive and finite".into());
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err("tau values must be strictly increasing".into());
    }
    Ok(grid)
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not a number"))
}

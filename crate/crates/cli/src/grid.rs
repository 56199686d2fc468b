/// Eb/N0 values in dB, in the order given.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

/// Parses `start:step:stop` ranges (stop included) and comma-separated values,
/// e.g. `0:2:8` or `0:1:3,5,7.5`.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [x] => out.push(number(x)?),
            [start, step, stop] => {
                let (start, step, stop) = (number(start)?, number(step)?, number(stop)?);
                if step <= 0.0 {
                    return Err(format!("step in {part:?} must be positive"));
                }
                if stop < start {
                    return Err(format!("range {part:?} ends before it starts"));
                }
                // tolerate accumulated rounding in the count
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 10_000 {
                    return Err(format!("range {part:?} has {count} points"));
                }
                out.extend((0..count).map(|k| start + k as f64 * step));
            }
            _ => return Err(format!("{part:?} is neither a value nor start:step:stop")),
        }
    }
    Ok(Grid(out))
}

//! The Cantor function, the distribution function of the middle-thirds
//! Cantor measure.

/// Base-3 digits examined before truncating.
pub const CANTOR_DIGITS: u32 = 64;

/// `F(x)` for the standard Cantor function: `0` on `(-inf, 0]`, `1` on
/// `[1, inf)`, continuous and nondecreasing in between.
///
/// Evaluated from the ternary expansion of `x`: digits `0`/`2` become binary
/// digits `0`/`1`, and the first digit `1` terminates the expansion with a
/// binary `1`.
pub fn cantor(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let mut rest = x;
    let mut value = 0.0;
    let mut weight = 0.5;
    for _ in 0..CANTOR_DIGITS {
        rest *= 3.0;
        let digit = if rest >= 2.0 {
            2
        } else if rest >= 1.0 {
            1
        } else {
            0
        };
        rest -= digit as f64;
        match digit {
            1 => return value + weight,
            2 => value += weight,
            _ => {}
        }
        weight *= 0.5;
        if rest <= 0.0 {
            break;
        }
    }
    value
}

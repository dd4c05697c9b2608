//! Value formats shared by the block-structured constructions: positions
//! travel inside values as `{position}:{symbol}` fragments, and block
//! reducers rebuild their substring from them.

use mrc_core::Rational;

/// `{position}:{symbol}` — the value a block's reducer receives for one
/// input position.
pub(crate) fn position_fragment(position: usize, symbol: u8) -> Vec<u8> {
    let mut v = position.to_string().into_bytes();
    v.push(b':');
    v.push(symbol);
    v
}

/// Parses a `{position}:{symbol}` fragment.
pub(crate) fn parse_fragment(value: &[u8]) -> Result<(usize, u8), String> {
    let colon = value
        .iter()
        .position(|&b| b == b':')
        .ok_or_else(|| format!("value {value:?} is not a position fragment"))?;
    let position: usize = std::str::from_utf8(&value[..colon])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("value {value:?} has a malformed position"))?;
    if value.len() != colon + 2 {
        return Err(format!(
            "fragment for position {position} carries {} symbol bytes, expected 1",
            value.len() - colon - 1
        ));
    }
    Ok((position, value[colon + 1]))
}

/// Rebuilds a block's bytes from `{position}:{symbol}` fragments covering
/// positions `start..start+len`. Every position must arrive exactly once.
pub(crate) fn reassemble_block(
    values: impl Iterator<Item = impl AsRef<[u8]>>,
    start: usize,
    len: usize,
) -> Result<Vec<u8>, String> {
    let mut slots: Vec<Option<u8>> = vec![None; len];
    for value in values {
        let (position, symbol) = parse_fragment(value.as_ref())?;
        let offset = position
            .checked_sub(start)
            .filter(|&o| o < len)
            .ok_or_else(|| format!("position {position} outside block of {len} at {start}"))?;
        if slots[offset].replace(symbol).is_some() {
            return Err(format!("duplicate fragment for position {position}"));
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(o, s)| s.ok_or_else(|| format!("missing fragment for position {}", start + o)))
        .collect()
}

/// Parses a decimal key or tag.
pub(crate) fn parse_decimal(bytes: &[u8], what: &str) -> Result<usize, String> {
    std::str::from_utf8(bytes)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("{what} {bytes:?} is not a decimal number"))
}

/// The space exponent a two-round block construction needs: round 1 holds a
/// block of `⌈n^ε⌉` positions, round 2 holds `⌈n^{1−ε}⌉` block summaries, so
/// the budget's exponent is the larger of the two.
pub(crate) fn split_space_exponent(epsilon: Rational) -> Rational {
    let complement = Rational::new(
        epsilon.denominator() - epsilon.numerator(),
        epsilon.denominator(),
    )
    .expect("proper exponent has a proper complement");
    let eps_lhs = epsilon.numerator() * complement.denominator();
    let comp_lhs = complement.numerator() * epsilon.denominator();
    if comp_lhs > eps_lhs {
        complement
    } else {
        epsilon
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments_round_trip() {
        for (pos, sym) in [(1usize, b'0'), (512, b':'), (7, b'|')] {
            let v = position_fragment(pos, sym);
            assert_eq!(parse_fragment(&v).unwrap(), (pos, sym));
        }
    }

    #[test]
    fn reassembly_demands_exact_coverage() {
        let vals = [
            position_fragment(5, b'c'),
            position_fragment(4, b'b'),
            position_fragment(3, b'a'),
        ];
        assert_eq!(
            reassemble_block(vals.iter(), 3, 3).unwrap(),
            b"abc".to_vec()
        );
        assert!(reassemble_block(vals.iter().take(2), 3, 3).is_err());
        assert!(reassemble_block(vals.iter().chain(vals.iter().take(1)), 3, 3).is_err());
        assert!(reassemble_block(vals.iter(), 4, 3).is_err());
    }

    #[test]
    fn split_exponent_picks_the_larger_side() {
        let q = |n, d| Rational::new(n, d).unwrap();
        assert_eq!(split_space_exponent(q(1, 4)), q(3, 4));
        assert_eq!(split_space_exponent(q(1, 2)), q(1, 2));
        assert_eq!(split_space_exponent(q(3, 4)), q(3, 4));
        assert_eq!(split_space_exponent(q(2, 3)), q(2, 3));
    }
}

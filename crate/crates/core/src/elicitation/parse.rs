//! Score extraction from free-text responses.

use std::sync::OnceLock;

use regex::Regex;

use super::ElicitError;

fn number() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[0-9]+(?:\.[0-9]+)?").expect("static regex"))
}

/// First numeric token in the response, clamped to `[0, 10]`.
pub fn parse_score(response: &str) -> Result<f64, ElicitError> {
    let m = number()
        .find(response)
        .ok_or_else(|| ElicitError::Unparseable(response.chars().take(80).collect()))?;
    let v: f64 = m.as_str().parse().map_err(|_| ElicitError::Unparseable(m.as_str().into()))?;
    Ok(v.clamp(0.0, 10.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(parse_score("Score: 7").unwrap(), 7.0);
        assert_eq!(parse_score("11.5 out of 10").unwrap(), 10.0);
        assert!(matches!(parse_score("I cannot rate this"), Err(ElicitError::Unparseable(_))));
    }

    #[test]
    fn first_token_wins_and_dot_is_literal() {
        assert_eq!(parse_score("6.5/10, maybe 8").unwrap(), 6.5);
        // A bare separator other than '.' ends the token.
        assert_eq!(parse_score("7x5").unwrap(), 7.0);
        assert_eq!(parse_score("-3").unwrap(), 3.0);
        assert_eq!(parse_score("  0").unwrap(), 0.0);
    }
}

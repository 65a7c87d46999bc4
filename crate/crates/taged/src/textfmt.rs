//! Lexical helpers shared by the text-format parsers.
//!
//! All formats are line oriented. `#` starts a comment that runs to the end
//! of the line, blank lines are ignored, and tokens never contain
//! whitespace.

/// Plain identifiers: symbol names, vertex names, term constants.
pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// State names admit a few extra characters so that product states like
/// `(cg.p1,pg.q_2_0)` remain single tokens. Parentheses must be balanced,
/// otherwise rule arguments could not be split back apart.
pub(crate) fn is_state_name(s: &str) -> bool {
    if s.is_empty() {
        return false;
    }
    let mut depth: i64 = 0;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == ',' => {}
            _ => return false,
        }
    }
    depth == 0
}

/// Iterate over the meaningful lines of a file: 1-based line number plus the
/// line with comments stripped and surrounding whitespace removed.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

/// Split `line` at the first `:` into a section keyword and its body.
pub(crate) fn keyword_and_body(line: &str) -> Option<(&str, &str)> {
    let (key, body) = line.split_once(':')?;
    Some((key.trim(), body.trim()))
}

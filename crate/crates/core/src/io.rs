//! Plain-text formats.
//!
//! Complexes (`.scx`): the first non-comment line is `dim <d>`, every further
//! line one facet as space-separated vertex labels. Colorings: one
//! `vertex color` pair per line. In both, `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::coloring::{Color, ColorMap};
use crate::complex::{Complex, Vertex};
use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("not an integer: {tok:?}") })
}

pub fn parse_scx(text: &str) -> Result<Complex> {
    let mut lines = content_lines(text);
    let (line, header) =
        lines.next().ok_or(Error::Parse { line: 0, msg: "missing `dim` header".into() })?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("dim") {
        return Err(Error::Parse { line, msg: "expected `dim <d>`".into() });
    }
    let dim: usize = match (tokens.next(), tokens.next()) {
        (Some(tok), None) => parse_num(tok, line)?,
        _ => return Err(Error::Parse { line, msg: "expected `dim <d>`".into() }),
    };
    let mut facets = Vec::new();
    for (line, text) in lines {
        let facet = text
            .split_whitespace()
            .map(|t| parse_num::<Vertex>(t, line))
            .collect::<Result<Vec<_>>>()?;
        if facet.len() > dim + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("facet has {} vertices, more than dim + 1", facet.len()),
            });
        }
        facets.push(facet);
    }
    let complex = Complex::from_facets(facets)?;
    if complex.dim() != dim as isize {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header says dim {dim} but facets give dim {}", complex.dim()),
        });
    }
    Ok(complex)
}

pub fn write_scx(complex: &Complex) -> String {
    let mut out = format!("dim {}\n", complex.dim());
    for f in complex.facets() {
        let labels: Vec<String> = f.iter().map(ToString::to_string).collect();
        out.push_str(&labels.join(" "));
        out.push('\n');
    }
    out
}

/// Palette size is taken as the largest color that occurs.
pub fn parse_coloring(text: &str) -> Result<ColorMap> {
    let mut colors: BTreeMap<Vertex, Color> = BTreeMap::new();
    for (line, text) in content_lines(text) {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let [v, c] = toks[..] else {
            return Err(Error::Parse { line, msg: "expected `vertex color`".into() });
        };
        let v: Vertex = parse_num(v, line)?;
        let c: Color = parse_num(c, line)?;
        if c == 0 {
            return Err(Error::Parse { line, msg: "colors start at 1".into() });
        }
        if colors.insert(v, c).is_some() {
            return Err(Error::Parse { line, msg: format!("vertex {v} colored twice") });
        }
    }
    let palette = colors.values().copied().max().unwrap_or(0);
    ColorMap::new(colors, palette)
}

pub fn write_coloring(coloring: &ColorMap) -> String {
    let mut out = String::new();
    for (v, c) in coloring.iter() {
        let _ = writeln!(out, "{v} {c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::cross_polytope_boundary;

    #[test]
    fn scx_round_trip() {
        let o = cross_polytope_boundary(3).unwrap();
        let text = write_scx(&o.complex);
        assert!(text.starts_with("dim 2\n"));
        assert_eq!(parse_scx(&text).unwrap(), o.complex);

        let coloring = parse_coloring(&write_coloring(&o.coloring)).unwrap();
        assert_eq!(coloring, o.coloring);
    }

    #[test]
    fn scx_comments_and_blank_lines() {
        let text = "# a triangle\n\ndim 1\n1 2 # first\n2 3\n\n3 1\n";
        let c = parse_scx(text).unwrap();
        assert_eq!(c.num_facets(), 3);
    }

    #[test]
    fn scx_errors() {
        assert!(parse_scx("").is_err());
        assert!(parse_scx("dims 2\n1 2 3\n").is_err());
        assert!(matches!(parse_scx("dim 1\n1 2 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_scx("dim 2\n1 2\n").is_err());
        assert!(parse_scx("dim 1\n1 x\n").is_err());
        assert!(parse_scx("dim 1\n").is_err());
    }

    #[test]
    fn coloring_errors() {
        assert!(parse_coloring("1 0\n").is_err());
        assert!(parse_coloring("1 2 3\n").is_err());
        assert!(parse_coloring("1 1\n1 2\n").is_err());
    }
}

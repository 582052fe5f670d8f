use std::fmt::Write as _;

use super::TreeDecomposition;
use crate::model::{parse_count, parse_vertex, ParseError};

impl TreeDecomposition {
    /// Reads the PACE `.td` format: `s td <bags> <max bag size> <vertices>`,
    /// `b <id> <v...>` bag lines and `<id> <id>` tree edges. Node 1 becomes the root.
    pub fn parse_pace(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut edges = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts[0] == "s" {
                if header.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                if parts.len() != 5 || parts[1] != "td" {
                    return Err(ParseError::MalformedHeader {
                        line,
                        reason: "expected `s td <bags> <max bag size> <vertices>`".into(),
                    });
                }
                let nb = parse_count(parts[2], line)?;
                let width = parse_count(parts[3], line)?;
                let nv = parse_count(parts[4], line)?;
                bags = vec![None; nb];
                header = Some((nb, width, nv, line));
                continue;
            }
            let Some((nb, _, nv, _)) = header else {
                return Err(ParseError::MissingHeader { line });
            };
            if parts[0] == "b" {
                if parts.len() < 2 {
                    return Err(ParseError::Syntax {
                        line,
                        reason: "bag line without id".into(),
                    });
                }
                let id = parse_bag_index(parts[1], nb, line)?;
                if bags[id].is_some() {
                    return Err(ParseError::DuplicateBag { line, bag: id + 1 });
                }
                let vertices = parts[2..]
                    .iter()
                    .map(|t| parse_vertex(t, nv, line))
                    .collect::<Result<Vec<_>, _>>()?;
                bags[id] = Some(vertices);
            } else {
                if parts.len() != 2 {
                    return Err(ParseError::Syntax {
                        line,
                        reason: "tree edge line must contain exactly two bag ids".into(),
                    });
                }
                let a = parse_bag_index(parts[0], nb, line)?;
                let b = parse_bag_index(parts[1], nb, line)?;
                edges.push((a, b));
            }
        }

        let Some((_, declared_max, nv, header_line)) = header else {
            return Err(ParseError::MissingHeader {
                line: last_line.max(1),
            });
        };
        if let Some(missing) = bags.iter().position(Option::is_none) {
            return Err(ParseError::MissingBag {
                line: header_line,
                bag: missing + 1,
            });
        }
        let bags: Vec<Vec<usize>> = bags.into_iter().map(Option::unwrap).collect();
        let found_max = bags.iter().map(Vec::len).max().unwrap_or(0);
        if found_max != declared_max {
            return Err(ParseError::BagSizeMismatch {
                line: header_line,
                declared: declared_max,
                found: found_max,
            });
        }
        Ok(TreeDecomposition::new(nv, bags, edges, 0))
    }

    /// Writes the PACE `.td` format; bag ids are node indices plus one.
    pub fn to_pace(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "s td {} {} {}",
            self.node_count(),
            self.max_bag_size(),
            self.num_vertices()
        )
        .unwrap();
        for (id, bag) in self.bags().iter().enumerate() {
            write!(out, "b {}", id + 1).unwrap();
            for v in bag {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        for &(a, b) in self.edges() {
            writeln!(out, "{} {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

fn parse_bag_index(token: &str, declared: usize, line: usize) -> Result<usize, ParseError> {
    let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
        line,
        token: token.to_string(),
    })?;
    if value < 1 || value as u64 > declared as u64 {
        return Err(ParseError::BagIndexOutOfRange {
            line,
            bag: value,
            declared,
        });
    }
    Ok(value as usize - 1)
}

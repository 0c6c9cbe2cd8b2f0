//! PACE 2017 `.gr` and `.td` formats (1-based vertex and bag ids).

use std::fmt::Write as _;

use super::{PrimalGraph, TdError, TreeDecomposition};

fn format_err(line: usize, message: impl Into<String>) -> TdError {
    TdError::Format {
        line,
        message: message.into(),
    }
}

/// Reads a `.td` file and validates it against `graph`.
pub fn parse_pace(text: &[u8], graph: &PrimalGraph) -> Result<TreeDecomposition, TdError> {
    let text = std::str::from_utf8(text).map_err(|_| format_err(0, "input is not UTF-8"))?;
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<u32>>> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| -> Result<usize, TdError> {
            t.parse::<usize>()
                .map_err(|_| format_err(line_no, format!("`{t}` is not a non-negative integer")))
        };
        match tokens[0] {
            "s" => {
                if header.is_some() {
                    return Err(format_err(line_no, "duplicate solution line"));
                }
                if tokens.len() != 5 || tokens[1] != "td" {
                    return Err(format_err(line_no, "expected `s td <bags> <max bag size> <vertices>`"));
                }
                let h = (num(tokens[2])?, num(tokens[3])?, num(tokens[4])?);
                bags = vec![None; h.0];
                header = Some(h);
            }
            "b" => {
                let (count, max_bag, vertices) = header.ok_or_else(|| format_err(line_no, "bag before `s td` line"))?;
                if tokens.len() < 2 {
                    return Err(format_err(line_no, "bag line without id"));
                }
                let id = num(tokens[1])?;
                if id == 0 || id > count {
                    return Err(format_err(line_no, format!("bag id {id} outside 1..={count}")));
                }
                if bags[id - 1].is_some() {
                    return Err(format_err(line_no, format!("bag {id} defined twice")));
                }
                let mut bag = Vec::with_capacity(tokens.len() - 2);
                for t in &tokens[2..] {
                    let v = num(t)?;
                    if v == 0 || v > vertices {
                        return Err(format_err(line_no, format!("vertex {v} outside 1..={vertices}")));
                    }
                    bag.push((v - 1) as u32);
                }
                if bag.len() > max_bag {
                    return Err(format_err(line_no, format!("bag {id} exceeds the declared size {max_bag}")));
                }
                bags[id - 1] = Some(bag);
            }
            _ => {
                let (count, _, _) = header.ok_or_else(|| format_err(line_no, "edge before `s td` line"))?;
                if tokens.len() != 2 {
                    return Err(format_err(line_no, "expected a tree edge `<bag> <bag>`"));
                }
                let (a, b) = (num(tokens[0])?, num(tokens[1])?);
                for id in [a, b] {
                    if id == 0 || id > count {
                        return Err(format_err(line_no, format!("bag id {id} outside 1..={count}")));
                    }
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, _, vertices) = header.ok_or_else(|| format_err(0, "missing `s td` line"))?;
    if vertices != graph.vertex_count() {
        return Err(TdError::VertexCountMismatch {
            expected: graph.vertex_count(),
            found: vertices,
        });
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| format_err(0, format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    let td = TreeDecomposition::new(bags, edges, 0);
    td.validate(graph)?;
    Ok(td)
}

/// Writes a `.td` file.
pub fn write_pace_td(td: &TreeDecomposition, num_vertices: usize) -> String {
    let mut out = String::new();
    let max_bag = td.bags().iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(out, "s td {} {} {}", td.num_nodes(), max_bag, num_vertices);
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in td.edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// Writes a `.gr` file.
pub fn write_pace_gr(graph: &PrimalGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p tw {} {}", graph.vertex_count(), graph.edge_count());
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_path_decomposition() {
        let g = PrimalGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let td = parse_pace(b"s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2", &g).unwrap();
        assert_eq!(td.width(), 1);
        assert_eq!(td.bags(), &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn rejects_invalid_input() {
        let triangle = PrimalGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(
            parse_pace(b"s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2", &triangle),
            Err(TdError::EdgeNotCovered(0, 2))
        );
        let g = PrimalGraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert!(matches!(
            parse_pace(b"s td 2 2 3\nb 0 1 2\nb 2 2 3\n1 2", &g),
            Err(TdError::Format { line: 2, .. })
        ));
        assert!(matches!(
            parse_pace(b"s td 2 2 4\nb 1 1 2\nb 2 2 3\n1 2", &g),
            Err(TdError::VertexCountMismatch { .. })
        ));
        assert!(matches!(parse_pace(b"b 1 1 2\n", &g), Err(TdError::Format { .. })));
    }

    #[test]
    fn write_then_read() {
        let g = PrimalGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let td = TreeDecomposition::from_elimination_order(&g, &[0, 1, 2, 3]);
        let text = write_pace_td(&td, 4);
        let back = parse_pace(text.as_bytes(), &g).unwrap();
        assert_eq!(back.bags(), td.bags());
        assert_eq!(write_pace_gr(&g), "p tw 4 4\n1 2\n1 4\n2 3\n3 4\n");
    }
}

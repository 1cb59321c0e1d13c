use ratquiver::exact_algebra::QuadMatrix;
use ratquiver::representations::QuiverRep;

fn space(r: &QuiverRep, v: usize) -> String {
    match r.dims[v] {
        0 => "0".to_string(),
        1 => r.field.label(),
        d => format!("{}^{d}", r.field.label()),
    }
}

fn matrix(m: &QuadMatrix) -> String {
    if m.rows() == 0 || m.cols() == 0 {
        return format!("0 ({}x{})", m.rows(), m.cols());
    }
    let rows: Vec<String> = m.to_rows().iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")).collect();
    format!("[{}]", rows.join("; "))
}

/// Text form of a representation: the spaces in vertex order, then every edge map and
/// every nontrivial semilinear structure map. Deterministic in the input.
pub fn render_diagram(r: &QuiverRep) -> String {
    let q = &r.quiver;
    let names: Vec<&str> = q.vertex_names.iter().map(String::as_str).collect();
    let spaces: Vec<String> = (0..q.vertex_count()).map(|v| space(r, v)).collect();
    let width: Vec<usize> = names.iter().zip(&spaces).map(|(a, b)| a.len().max(b.len())).collect();
    let pad = |cells: &[String]| -> String {
        cells.iter().zip(&width).map(|(c, w)| format!("{c:^w$}")).collect::<Vec<_>>().join(" | ")
    };
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let mut out = format!("vertices: {}\nspaces:   {}\n", pad(&names), pad(&spaces));
    for e in 0..q.edge_count() {
        out += &format!(
            "{}: {} -> {} = {}\n",
            q.edge_names[e],
            q.vertex_names[q.src[e]],
            q.vertex_names[q.tgt[e]],
            matrix(&r.edges[e])
        );
    }
    for g in q.group.elements().filter(|&g| g != q.group.identity()) {
        for v in 0..q.vertex_count() {
            let s = &r.phi(v, g);
            out += &format!(
                "rational[{g}]: {} -> {} = {}\n",
                q.vertex_names[v],
                q.vertex_names[q.vertices.act(g, v)],
                matrix(&s.matrix)
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ratquiver::exact_algebra::QuadField;
    use ratquiver::quiver::fixtures;

    #[test]
    fn zero_rep_renders_all_zero() {
        let r = QuiverRep::zero(fixtures::gelfand(), QuadField::gaussian()).unwrap();
        let d = render_diagram(&r);
        assert!(d.contains("spaces:   0 | 0 | 0"), "{d}");
        assert!(d.contains("a-: - -> * = 0 (0x0)"), "{d}");
    }
}

//! Bill-of-material CSV.
//!
//! Header `library,deviceset,device,value,qty,refs`; `refs` lists
//! `design/part` joined with `;`. UTF-8 with LF line endings; fields are
//! quoted only when they need to be.

use pcblint_core::bom::BomLine;

pub fn render_bom(lines: &[BomLine]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["library", "deviceset", "device", "value", "qty", "refs"]).expect("in-memory write");
    for line in lines {
        let refs: Vec<String> = line.refs.iter().map(|(d, p)| format!("{d}/{p}")).collect();
        let qty = line.quantity().to_string();
        let k = &line.key;
        w.write_record([&k.library, &k.deviceset, &k.device, &k.value, &qty, &refs.join(";")])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("inputs are UTF-8")
}

/// Names designs after their file stems, numbering repeats (`blinky`,
/// `blinky-2`, ...) in argument order.
pub fn design_names<'a>(stems: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut seen = std::collections::BTreeMap::<&str, usize>::new();
    stems
        .into_iter()
        .map(|s| {
            let n = seen.entry(s).or_insert(0);
            *n += 1;
            if *n == 1 { s.to_string() } else { format!("{s}-{n}") }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcblint_core::bom::BomKey;

    #[test]
    fn quoting_and_line_endings() {
        let line = BomLine {
            key: BomKey { library: "rcl".into(), deviceset: "R".into(), device: "0805".into(), value: "1k, 1%".into() },
            refs: vec![("a".into(), "R1".into())],
        };
        assert_eq!(
            render_bom(&[line]),
            "library,deviceset,device,value,qty,refs\nrcl,R,0805,\"1k, 1%\",1,a/R1\n"
        );
        assert_eq!(render_bom(&[]), "library,deviceset,device,value,qty,refs\n");
    }

    #[test]
    fn repeated_stems_are_numbered() {
        assert_eq!(design_names(["b", "a", "b", "b"]), ["b", "a", "b-2", "b-3"]);
    }
}

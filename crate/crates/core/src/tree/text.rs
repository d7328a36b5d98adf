use super::{EdgeDeco, EdgeKind, Tree, TreeError};
use crate::freq_poly::FreqVector;

/// Parses the compact form `I[t2,0](-k1+k2+k3; I[t1,1](k1), I[t1,0](k2), I[t1,0](k3))`.
pub fn parse_tree(s: &str) -> Result<Tree, TreeError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let t = tree(compact.as_bytes(), &mut pos)?;
    if pos != compact.len() {
        return Err(TreeError::Syntax(format!("trailing input at {pos}")));
    }
    Ok(t)
}

fn expect(src: &[u8], pos: &mut usize, lit: &str) -> Result<(), TreeError> {
    if src[*pos..].starts_with(lit.as_bytes()) {
        *pos += lit.len();
        Ok(())
    } else {
        Err(TreeError::Syntax(format!("expected `{lit}` at {pos}")))
    }
}

fn tree(src: &[u8], pos: &mut usize) -> Result<Tree, TreeError> {
    expect(src, pos, "I[")?;
    let kind = if src[*pos..].starts_with(b"t1") {
        EdgeKind::T1
    } else if src[*pos..].starts_with(b"t2") {
        EdgeKind::T2
    } else {
        return Err(TreeError::Syntax(format!("expected t1 or t2 at {pos}")));
    };
    *pos += 2;
    expect(src, pos, ",")?;
    let conj = match src.get(*pos) {
        Some(b'0') => false,
        Some(b'1') => true,
        _ => return Err(TreeError::Syntax(format!("expected conj bit at {pos}"))),
    };
    *pos += 1;
    expect(src, pos, "](")?;
    let start = *pos;
    while *pos < src.len() && src[*pos] != b';' && src[*pos] != b')' {
        *pos += 1;
    }
    let freq = FreqVector::parse(std::str::from_utf8(&src[start..*pos]).unwrap_or(""))?;
    let mut children = Vec::new();
    if src.get(*pos) == Some(&b';') {
        *pos += 1;
        loop {
            children.push(tree(src, pos)?);
            if src.get(*pos) == Some(&b',') {
                *pos += 1;
            } else {
                break;
            }
        }
    }
    expect(src, pos, ")")?;
    Ok(Tree::new(EdgeDeco::new(kind, conj), freq, children))
}

//! Small hand-checkable contexts.

use crate::context::Context;

/// The six-object, five-item sample database used throughout the tests:
///
/// ```text
///      a b c d e
/// o1     x x   x
/// o2   x   x x
/// o3   x x x x
/// o4   x     x
/// o5   x x x x
/// o6   x   x x
/// ```
pub fn table1() -> Context {
    let rows: [(&str, &[&str]); 6] = [
        ("o1", &["b", "c", "e"]),
        ("o2", &["a", "c", "d"]),
        ("o3", &["a", "b", "c", "d"]),
        ("o4", &["a", "d"]),
        ("o5", &["a", "b", "c", "d"]),
        ("o6", &["a", "c", "d"]),
    ];
    let mut b = Context::builder();
    for name in ["a", "b", "c", "d", "e"] {
        b.item(name, None);
    }
    for (tid, items) in rows {
        b.object(tid);
        for item in items {
            b.pair(tid, item);
        }
    }
    b.build()
}

/// The same relation in pair-list CSV form.
pub const TABLE1_CSV: &str = "tid,item
o1,b
o1,c
o1,e
o2,a
o2,c
o2,d
o3,a
o3,b
o3,c
o3,d
o4,a
o4,d
o5,a
o5,b
o5,c
o5,d
o6,a
o6,c
o6,d
";

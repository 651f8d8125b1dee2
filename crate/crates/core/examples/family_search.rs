//! Random search over a family of actions, resumed from its cursor.

use gsubmod::search::{search, SearchConfig};
use gsubmod::Caps;

fn main() -> gsubmod::Result<()> {
    let caps = Caps::default();
    let mut config = SearchConfig::new("symmetric:4".parse()?, "kneser".parse()?, 200, 1);
    let first = search(&config, &caps)?;
    println!("{} on {}: {} instances, {} hits", first.predicate, first.family, first.instances, first.hits);
    if let Some(r) = first.records.first() {
        println!("  first hit at cursor {}: A = {:?}, Y = {:?}, shape {}", r.cursor, r.instance.a, r.instance.y, r.instance.shape);
    }
    config.cursor = first.next_cursor;
    let next = search(&config, &caps)?;
    println!("resumed at {}: {} more hits", next.start_cursor, next.hits);

    let affine = search(&SearchConfig::new("affine:7".parse()?, "kneser_trivial_stabilizer".parse()?, 500, 1), &caps)?;
    println!("affine:7 trivial-stabilizer hits: {}, small sumsets: {:?}", affine.hits, affine.small_sumsets);
    Ok(())
}

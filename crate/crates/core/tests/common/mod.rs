// Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_bigint::BigInt;
use proptest::prelude::*;
use rspin_core::store::write_atomic;
use rspin_core::{CacheStore, Dr1Bracket, Genus0Bracket, Rational};

pub fn g0_key() -> impl Strategy<Value = String> {
    (2i64..=40, 3usize..=8)
        .prop_flat_map(|(r, n)| (Just(r), prop::collection::vec(0..r, n)))
        .prop_map(|(r, a)| Genus0Bracket::new(r, &a).expect("in range").key())
}

pub fn dr1_key() -> impl Strategy<Value = String> {
    (2i64..=40, 1usize..=6)
        .prop_flat_map(|(r, n)| (Just(r), prop::collection::vec(-12i64..=12, n), prop::collection::vec(0..r, n + 1)))
        .prop_map(|(r, k, a)| dr1_key_from(r, k, &a))
}

fn dr1_key_from(r: i64, mut k: Vec<i64>, a: &[i64]) -> String {
    if k.iter().all(|&x| x == 0) {
        k[0] = 1;
    }
    k.push(-k.iter().sum::<i64>());
    Dr1Bracket::new(r, &k, a).expect("valid by construction").key()
}

/// Exactly `len` entries. Entry `i` uses spin `10_000 + i` (genus 0) or
/// `20_000 + i` (genus 1), so keys never collide and nothing is rejected.
pub fn distinct_entries(len: usize) -> impl Strategy<Value = BTreeMap<String, Rational>> {
    let entry = (any::<bool>(), 3usize..=7, prop::collection::vec(any::<u32>(), 7), value());
    prop::collection::vec(entry, len).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (genus1, n, raw, v))| {
                let r = if genus1 { 20_000 } else { 10_000 } + i as i64;
                let a: Vec<i64> = raw[..n].iter().map(|&x| x as i64 % r).collect();
                let key = if genus1 {
                    let k: Vec<i64> = raw[..n - 1].iter().map(|&x| (x % 19) as i64 - 9).collect();
                    dr1_key_from(r, k, &a)
                } else {
                    Genus0Bracket::new(r, &a).expect("in range").key()
                };
                (key, v)
            })
            .collect()
    })
}

pub fn value() -> impl Strategy<Value = Rational> {
    (any::<i64>(), 1i64..=i64::MAX, 0u32..=4).prop_map(|(n, d, widen)| {
        // widen pushes numerators well past 64 bits
        let scale = BigInt::from(10u8).pow(widen * 9);
        Rational::new(BigInt::from(n) * scale, BigInt::from(d))
    })
}

pub fn entries(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = BTreeMap<String, Rational>> {
    prop::collection::btree_map(prop_oneof![g0_key(), dr1_key()], value(), len)
}

pub fn store_of(entries: &BTreeMap<String, Rational>) -> CacheStore {
    let mut s = CacheStore::new();
    for (k, v) in entries {
        s.put(k, v.clone()).expect("generated keys are canonical");
    }
    s
}

fn contents(s: &CacheStore) -> BTreeMap<String, Rational> {
    s.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// save then load through a real file gives back the same map.
pub fn check_round_trip(dir: &Path, entries: &BTreeMap<String, Rational>) -> Result<(), String> {
    let path = dir.join("cache.json");
    let mut s = store_of(entries);
    s.save(&path).map_err(|e| e.to_string())?;
    let back = CacheStore::load(&path).map_err(|e| e.to_string())?;
    if contents(&back) != *entries {
        return Err(format!("round trip changed the map ({} entries)", entries.len()));
    }
    // second save of the reloaded store is byte identical
    let again = dir.join("again.json");
    back.clone().save(&again).map_err(|e| e.to_string())?;
    let (x, y) = (std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    if x != y {
        return Err("re-serialization is not byte identical".into());
    }
    Ok(())
}

/// A save whose writer fails or panics after `partial` bytes must leave the
/// previous file intact and leave no stray temporary files behind.
pub fn check_interrupted_save(
    dir: &Path,
    entries: &BTreeMap<String, Rational>,
    partial: usize,
    panic: bool,
) -> Result<(), String> {
    let path = dir.join("cache.json");
    let mut s = store_of(entries);
    s.save(&path).map_err(|e| e.to_string())?;
    let before = std::fs::read(&path).unwrap();

    let junk = vec![b'{'; partial];
    let attempt = catch_unwind(AssertUnwindSafe(|| {
        write_atomic(&path, |w: &mut dyn Write| {
            w.write_all(&junk)?;
            if panic {
                panic!("simulated crash during save");
            }
            Err(io::Error::other("simulated write failure"))
        })
    }));
    match (&attempt, panic) {
        (Err(_), true) | (Ok(Err(_)), false) => {}
        _ => return Err("interrupted save reported success".into()),
    }
    if std::fs::read(&path).unwrap() != before {
        return Err("previous cache file was modified".into());
    }
    let loaded = CacheStore::load(&path).map_err(|e| e.to_string())?;
    if contents(&loaded) != *entries {
        return Err("previous cache no longer loads to the same map".into());
    }
    let stray = std::fs::read_dir(dir).unwrap().count();
    if stray != 1 {
        return Err(format!("{stray} files in cache directory, expected 1"));
    }
    Ok(())
}

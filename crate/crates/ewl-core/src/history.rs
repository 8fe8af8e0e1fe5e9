//! Rolling FIFO database of per-sell-date offer and booking counts,
//! aggregated across all active flights.
//!
//! Fares are identified by ladder index. The window keeps at most `capacity`
//! consecutive sell dates; appending to a full window evicts the oldest.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::error::{Error, Result};

/// Offer and booking counts for one sell date, one slot per ladder fare.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SellDateRecord {
    sell_date: u64,
    offers: Vec<u32>,
    bookings: Vec<u32>,
}

impl SellDateRecord {
    /// Bookings require offers: any fare with zero offers must have zero
    /// bookings. Bookings may exceed offers (several Poisson arrivals can
    /// book against one offer).
    pub fn new(sell_date: u64, offers: Vec<u32>, bookings: Vec<u32>) -> Result<Self> {
        if offers.len() != bookings.len() {
            return Err(Error::FareCountMismatch {
                got: bookings.len(),
                expected: offers.len(),
            });
        }
        for (i, (&o, &b)) in offers.iter().zip(&bookings).enumerate() {
            if o == 0 && b > 0 {
                return Err(Error::BookingsWithoutOffers(i));
            }
        }
        Ok(Self {
            sell_date,
            offers,
            bookings,
        })
    }

    pub fn sell_date(&self) -> u64 {
        self.sell_date
    }

    pub fn n_fares(&self) -> usize {
        self.offers.len()
    }

    pub fn offers(&self) -> &[u32] {
        &self.offers
    }

    pub fn bookings(&self) -> &[u32] {
        &self.bookings
    }
}

/// FIFO window of [`SellDateRecord`]s, newest last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryWindow {
    capacity: usize,
    n_fares: usize,
    records: VecDeque<SellDateRecord>,
}

impl HistoryWindow {
    pub fn new(capacity: usize, n_fares: usize) -> Self {
        assert!(capacity >= 1, "window capacity must be at least 1");
        Self {
            capacity,
            n_fares,
            records: VecDeque::with_capacity(capacity + 1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn n_fares(&self) -> usize {
        self.n_fares
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &SellDateRecord> {
        self.records.iter()
    }

    pub fn newest_sell_date(&self) -> Option<u64> {
        self.records.back().map(|r| r.sell_date())
    }

    pub fn oldest_sell_date(&self) -> Option<u64> {
        self.records.front().map(|r| r.sell_date())
    }

    /// Append the next sell date; evicts the oldest record when full.
    /// Sell dates must be consecutive.
    pub fn append(&mut self, record: SellDateRecord) -> Result<()> {
        if record.n_fares() != self.n_fares {
            return Err(Error::FareCountMismatch {
                got: record.n_fares(),
                expected: self.n_fares,
            });
        }
        if let Some(newest) = self.newest_sell_date() {
            if record.sell_date() != newest + 1 {
                return Err(Error::NonConsecutiveSellDate {
                    got: record.sell_date(),
                    newest,
                });
            }
        }
        self.records.push_back(record);
        if self.records.len() > self.capacity {
            self.records.pop_front();
        }
        Ok(())
    }

    /// Total offers for one fare over the newest `last_k` sell dates.
    pub fn total_offers(&self, fare_index: usize, last_k: usize) -> Result<u64> {
        self.check_range(fare_index, last_k)?;
        Ok(self
            .records
            .iter()
            .rev()
            .take(last_k)
            .map(|r| u64::from(r.offers()[fare_index]))
            .sum())
    }

    /// Total bookings for one fare over the newest `last_k` sell dates.
    pub fn total_bookings(&self, fare_index: usize, last_k: usize) -> Result<u64> {
        self.check_range(fare_index, last_k)?;
        Ok(self
            .records
            .iter()
            .rev()
            .take(last_k)
            .map(|r| u64::from(r.bookings()[fare_index]))
            .sum())
    }

    /// Per-fare offer totals over the newest `last_k` sell dates.
    pub fn offer_totals(&self, last_k: usize) -> Result<Vec<u64>> {
        self.check_len(last_k)?;
        let mut totals = vec![0u64; self.n_fares];
        for r in self.records.iter().rev().take(last_k) {
            for (t, &o) in totals.iter_mut().zip(r.offers()) {
                *t += u64::from(o);
            }
        }
        Ok(totals)
    }

    /// Per-fare booking totals over the newest `last_k` sell dates.
    pub fn booking_totals(&self, last_k: usize) -> Result<Vec<u64>> {
        self.check_len(last_k)?;
        let mut totals = vec![0u64; self.n_fares];
        for r in self.records.iter().rev().take(last_k) {
            for (t, &b) in totals.iter_mut().zip(r.bookings()) {
                *t += u64::from(b);
            }
        }
        Ok(totals)
    }

    /// CSV dump with columns `sell_date,fare_index,offers,bookings`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "sell_date,fare_index,offers,bookings")?;
        for r in &self.records {
            for i in 0..self.n_fares {
                writeln!(w, "{},{},{},{}", r.sell_date(), i, r.offers()[i], r.bookings()[i])?;
            }
        }
        Ok(())
    }

    fn check_len(&self, last_k: usize) -> Result<()> {
        if last_k > self.records.len() {
            return Err(Error::WindowRange {
                last_k,
                len: self.records.len(),
            });
        }
        Ok(())
    }

    fn check_range(&self, fare_index: usize, last_k: usize) -> Result<()> {
        if fare_index >= self.n_fares {
            return Err(Error::FareIndexOutOfRange {
                index: fare_index,
                n: self.n_fares,
            });
        }
        self.check_len(last_k)
    }
}

//! Gnuplot scripts that render the CSV outputs of the bench commands.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub csv: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    /// 1-based CSV columns.
    pub xcol: usize,
    pub ycol: usize,
    pub xaxis: Axis,
    pub yaxis: Axis,
}

impl Plot<'_> {
    /// A script that writes `<csv stem>.png` next to the data.
    pub fn script(&self) -> String {
        let png = match self.csv.strip_suffix(".csv") {
            Some(stem) => format!("{stem}.png"),
            None => format!("{}.png", self.csv),
        };
        let mut s = String::new();
        s.push_str("set terminal pngcairo size 800,600\n");
        s.push_str(&format!("set output '{}'\n", escape(&png)));
        s.push_str("set datafile separator ','\n");
        s.push_str(&format!("set title '{}'\n", escape(self.title)));
        s.push_str(&format!("set xlabel '{}'\n", escape(self.xlabel)));
        s.push_str(&format!("set ylabel '{}'\n", escape(self.ylabel)));
        if self.xaxis == Axis::Log {
            s.push_str("set logscale x\n");
        }
        if self.yaxis == Axis::Log {
            s.push_str("set logscale y\n");
        }
        s.push_str("set grid\n");
        s.push_str(&format!(
            "plot '{}' every ::1 using {}:{} with linespoints notitle\n",
            escape(self.csv),
            self.xcol,
            self.ycol
        ));
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\'', "''")
}

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace spica {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Complex exponential a * exp(j(2 pi f t + phase)).
struct ToneTerm {
  double amplitude = 1.0;
  double frequency_hz = 0.0;
  double phase_rad = 0.0;
};

/// Root-raised-cosine shaped symbol stream. Symbol k is centred at k / symbol_rate.
///
/// Symbols are rescaled to unit mean power on construction and the pulse is
/// scaled so the stream itself has unit average power. The symbol buffer is
/// shared between copies.
class StreamTerm {
 public:
  StreamTerm(std::vector<Complex> symbols, double symbol_rate_hz,
             double rolloff = 0.25, int span_symbols = 16);

  [[nodiscard]] std::span<const Complex> symbols() const { return *symbols_; }
  [[nodiscard]] double symbol_rate() const { return symbol_rate_; }
  [[nodiscard]] double symbol_period() const { return 1.0 / symbol_rate_; }
  [[nodiscard]] double rolloff() const { return rolloff_; }
  [[nodiscard]] int span_symbols() const { return span_; }
  /// Two-sided occupied bandwidth, symbol_rate * (1 + rolloff).
  [[nodiscard]] double occupied_bandwidth() const {
    return symbol_rate_ * (1.0 + rolloff_);
  }
  /// Pulse amplitude applied to each symbol, sqrt(T) * rrc(t).
  [[nodiscard]] double pulse(double t) const;

  [[nodiscard]] Complex eval(double t) const;

 private:
  std::shared_ptr<const std::vector<Complex>> symbols_;
  double symbol_rate_;
  double rolloff_;
  int span_;
};

[[nodiscard]] Complex eval(const ToneTerm& term, double t);
[[nodiscard]] inline Complex eval(const StreamTerm& term, double t) { return term.eval(t); }

/// A deterministic function of continuous time: scale * sum of weighted terms.
class Waveform {
 public:
  using Shape = std::variant<ToneTerm, StreamTerm>;
  struct Term {
    Complex weight;
    Shape shape;
  };

  Waveform() = default;
  explicit Waveform(Complex scale) : scale_(scale) {}

  static Waveform tone(double amplitude, double frequency_hz, double phase_rad = 0.0);
  static Waveform stream(StreamTerm term);

  Waveform& add(ToneTerm term, Complex weight = 1.0);
  Waveform& add(StreamTerm term, Complex weight = 1.0);

  [[nodiscard]] Complex scale() const { return scale_; }
  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }

  [[nodiscard]] Complex operator()(double t) const;

  friend Waveform operator*(Complex a, const Waveform& w);
  friend Waveform operator+(const Waveform& a, const Waveform& b);

 private:
  std::vector<Term> terms_;
  Complex scale_{1.0, 0.0};
};

[[nodiscard]] inline Complex eval(const Waveform& w, double t) { return w(t); }

/// Unit-energy root-raised-cosine pulse, zero beyond +-span_symbols periods.
///
/// The removable singularities at t = 0 and |t| = T / (4 rolloff) use their
/// analytic limits.
[[nodiscard]] double rrc_pulse(double t, double symbol_rate_hz, double rolloff,
                               int span_symbols = 16);

/// Gray-mapped unit-power QPSK. Bit pairs: 00 -> (1+j), 01 -> (-1+j),
/// 11 -> (-1-j), 10 -> (1-j), all over sqrt(2). Throws on an odd bit count.
[[nodiscard]] std::vector<Complex> map_qpsk(std::span<const std::uint8_t> bits);

/// Seeded random QPSK symbols.
[[nodiscard]] std::vector<Complex> random_qpsk(std::size_t count, std::uint64_t seed);

}  // namespace spica

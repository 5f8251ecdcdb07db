#include "shrinklab/profree.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "shrinklab/error.hpp"

namespace shrinklab {

  namespace {
    int mobius(int n) {
      int result = 1;
      for (int q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
          n /= q;
          if (n % q == 0) {
            return 0;
          }
          result = -result;
        }
      }
      return n > 1 ? -result : result;
    }

    std::int64_t ipow(std::int64_t base, int e) {
      std::int64_t r = 1;
      for (int i = 0; i < e; ++i) {
        r *= base;
      }
      return r;
    }

    // e (e-1) ... (e-n+1) / n!, exact for the small n used here
    std::int64_t binomial(std::int64_t e, int n) {
      __int128 num = 1;
      __int128 den = 1;
      for (int k = 0; k < n; ++k) {
        num *= e - k;
        den *= k + 1;
      }
      return static_cast<std::int64_t>(num / den);
    }

    std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
      std::int64_t r = a % m;
      return r < 0 ? r + m : r;
    }

    // all Lyndon words of length <= n over k letters, in lexicographic order
    std::vector<std::vector<int>> lyndon_words(int k, int n) {
      std::vector<std::vector<int>> out;
      std::vector<int>              w{-1};
      while (!w.empty()) {
        ++w.back();
        out.push_back(w);
        std::size_t const m = w.size();
        while (w.size() < std::size_t(n)) {
          w.push_back(w[w.size() - m]);
        }
        while (!w.empty() && w.back() == k - 1) {
          w.pop_back();
        }
      }
      return out;
    }
  }  // namespace

  std::int64_t witt_dim(std::int64_t d, int w) {
    SHRINKLAB_REQUIRE(d >= 1 && w >= 1, InvalidArgument, "witt_dim needs D, w >= 1");
    std::int64_t sum = 0;
    for (int e = 1; e <= w; ++e) {
      if (w % e == 0) {
        sum += mobius(e) * ipow(d, w / e);
      }
    }
    return sum / w;
  }

  ////////////////////////////////////////////////////////////////////////
  // HallBasis
  ////////////////////////////////////////////////////////////////////////

  HallBasis::HallBasis(int letters, int max_weight)
      : _letters(letters), _max_weight(max_weight) {
    SHRINKLAB_REQUIRE(letters >= 1 && max_weight >= 1, InvalidArgument, "empty Hall basis");
    auto words = lyndon_words(letters, max_weight);
    std::stable_sort(words.begin(), words.end(), [](auto const& a, auto const& b) {
      return a.size() < b.size();
    });
    std::map<std::vector<int>, int> index;
    _offsets.assign(max_weight + 1, 0);
    for (auto const& w : words) {
      HallCommutator c{int(w.size()), -1, -1, -1, w};
      if (w.size() == 1) {
        c.letter = w[0];
      } else {
        // standard factorization: the longest proper Lyndon suffix
        for (std::size_t cut = 1; cut < w.size(); ++cut) {
          std::vector<int> suffix(w.begin() + long(cut), w.end());
          auto             it = index.find(suffix);
          if (it != index.end()) {
            c.left  = index.at(std::vector<int>(w.begin(), w.begin() + long(cut)));
            c.right = it->second;
            break;
          }
        }
      }
      index.emplace(w, int(_items.size()));
      _items.push_back(std::move(c));
      ++_offsets[w.size()];
    }
    for (int w = 1; w <= max_weight; ++w) {
      _offsets[w] += _offsets[w - 1];
    }
  }

  int HallBasis::index_of(std::vector<int> const& word) const {
    if (word.empty() || word.size() > std::size_t(_max_weight)) {
      return -1;
    }
    auto const lo = _items.begin() + long(begin_of(int(word.size())));
    auto const hi = _items.begin() + long(end_of(int(word.size())));
    auto it = std::lower_bound(lo, hi, word, [](HallCommutator const& c, auto const& w) {
      return c.word < w;
    });
    return it != hi && it->word == word ? int(it - _items.begin()) : -1;
  }

  bool HallBasis::hall_condition(std::size_t k) const {
    auto const& c = _items[k];
    if (c.weight == 1) {
      return c.left < 0 && c.right < 0;
    }
    auto const& u = _items[c.left];
    auto const& v = _items[c.right];
    if (u.weight + v.weight != c.weight || !(u.word < v.word)) {
      return false;
    }
    return u.weight == 1 || !(_items[u.right].word < v.word);
  }

  std::string HallBasis::format(std::size_t k) const {
    auto const& c = _items[k];
    if (c.weight == 1) {
      return "x" + std::to_string(c.letter);
    }
    return "[" + format(c.left) + "," + format(c.right) + "]";
  }

  ////////////////////////////////////////////////////////////////////////
  // TruncatedFreeGroup
  ////////////////////////////////////////////////////////////////////////

  bool Word::is_identity() const noexcept {
    return std::all_of(_exps.begin(), _exps.end(), [](auto e) { return e == 0; });
  }

  TruncatedFreeGroup::TruncatedFreeGroup(Residue        p,
                                         std::size_t    d,
                                         GroupPtr       group,
                                         FilterIndex    nu_plus_1,
                                         TruncationCaps caps)
      : _p(p),
        _d(d),
        _group(std::move(group)),
        _nu_plus_1(nu_plus_1),
        _letters(int(d * _group->order())),
        // weights w < J keep p^(I+1-w) > 1, J <= w < I keep p^(I-w) > 1
        _class(std::max(nu_plus_1.i - 1, 0)),
        _hall(std::max(_letters, 1), std::max(nu_plus_1.i, 1)) {
    SHRINKLAB_REQUIRE(fp::is_prime(p), InvalidArgument, "p must be prime");
    SHRINKLAB_REQUIRE(d >= 1, InvalidArgument, "operator rank must be positive");
    SHRINKLAB_REQUIRE(nu_plus_1.valid(), InvalidArgument, "invalid filtration index");
    SHRINKLAB_REQUIRE(nu_plus_1.i <= caps.max_i,
                      CapExceeded,
                      "I = " + std::to_string(nu_plus_1.i) + " exceeds the cap " +
                          std::to_string(caps.max_i) + "; lower nu+1");
    SHRINKLAB_REQUIRE(_letters <= caps.max_letters,
                      CapExceeded,
                      "D = |G| d = " + std::to_string(_letters) + " exceeds the cap " +
                          std::to_string(caps.max_letters) + "; use a smaller group or d");
    std::size_t const D = std::size_t(_letters);
    _pow_d.assign(std::size_t(_class) + 1, 1);
    for (int t = 1; t <= _class; ++t) {
      _pow_d[t] = _pow_d[t - 1] * D;
      SHRINKLAB_REQUIRE(_pow_d[t] <= 8'000'000, CapExceeded, "series too large");
    }
    _rank = _class == 0 ? 0 : _hall.end_of(_class);

    std::size_t const n = _group->order();
    _letter_perm.assign(n, std::vector<int>(D));
    for (Element g = 0; g < n; ++g) {
      for (std::size_t i = 0; i < d; ++i) {
        for (Element h = 0; h < n; ++h) {
          _letter_perm[g][i * n + h] = int(i * n + _group->mul(g, h));
        }
      }
    }

    // series of every surviving basic commutator
    std::vector<Series> full(_rank);
    _y_powers.resize(_rank);
    _lie.resize(_rank);
    _word_index.resize(_rank);
    for (std::size_t k = 0; k < _rank; ++k) {
      auto const& c = _hall[k];
      if (c.weight == 1) {
        full[k]              = unit_series();
        full[k][1][c.letter] = 1;
      } else {
        auto const& u = full[c.left];
        auto const& v = full[c.right];
        full[k]       = mul(mul(inv(u), inv(v)), mul(u, v));
      }
      std::size_t idx = 0;
      for (int a : c.word) {
        idx = idx * D + std::size_t(a);
      }
      _word_index[k] = idx;

      Series y = full[k];
      y[0][0]  = 0;
      Series yn = y;
      for (int pw = 1; pw * c.weight <= _class; ++pw) {
        Sparse terms;
        for (int t = 1; t <= _class; ++t) {
          for (std::size_t i = 0; i < yn[t].size(); ++i) {
            if (yn[t][i] != 0) {
              terms.push_back({t, i, yn[t][i]});
            }
          }
        }
        _y_powers[k].push_back(std::move(terms));
        yn = mul(yn, y);
      }
      auto const& lead = full[k][c.weight];
      for (std::size_t i = 0; i < lead.size(); ++i) {
        if (lead[i] != 0) {
          _lie[k].emplace_back(i, lead[i]);
        }
      }
    }
    // extraction relies on a unitriangular leading-term matrix per weight
    for (int w = 1; w <= _class; ++w) {
      for (std::size_t k = _hall.begin_of(w); k < _hall.end_of(w); ++k) {
        for (auto [i, coef] : _lie[k]) {
          for (std::size_t l = _hall.begin_of(w); l <= k; ++l) {
            if (_word_index[l] == i) {
              SHRINKLAB_REQUIRE(l == k ? coef == 1 : false,
                                InternalVerifyFail,
                                "Lyndon leading terms are not unitriangular");
            }
          }
        }
      }
    }
  }

  std::int64_t TruncatedFreeGroup::modulus(FilterIndex mu, int w) const noexcept {
    if (w < mu.j) {
      return ipow(_p, mu.i + 1 - w);
    }
    return w <= mu.i ? ipow(_p, mu.i - w) : 1;
  }

  std::int64_t TruncatedFreeGroup::modulus(int w) const noexcept {
    return modulus(_nu_plus_1, w);
  }

  std::size_t TruncatedFreeGroup::log_order() const {
    std::size_t total = 0;
    for (int w = 1; w <= _class; ++w) {
      std::int64_t m = modulus(w);
      std::size_t  e = 0;
      while (m > 1) {
        m /= _p;
        ++e;
      }
      total += e * _hall.count(w);
    }
    return total;
  }

  int TruncatedFreeGroup::letter(std::size_t i, Element g) const {
    SHRINKLAB_REQUIRE(i >= 1 && i <= _d && g < _group->order(),
                      IndexOutOfRange,
                      "generator index out of range");
    return int((i - 1) * _group->order() + g);
  }

  void TruncatedFreeGroup::check_parent(Word const& u) const {
    SHRINKLAB_REQUIRE(u.parent() == this, ParentMismatch, "word belongs to another truncation");
  }

  Word TruncatedFreeGroup::identity() const {
    return Word(this, std::vector<std::int64_t>(_rank, 0));
  }

  Word TruncatedFreeGroup::letter_word(int a) const {
    SHRINKLAB_REQUIRE(a >= 0 && a < _letters, IndexOutOfRange, "letter out of range");
    std::vector<std::int64_t> e(_rank, 0);
    if (_class >= 1) {
      e[std::size_t(a)] = 1 % modulus(1);
    }
    return Word(this, std::move(e));
  }

  Word TruncatedFreeGroup::generator(std::size_t i, Element g) const {
    return letter_word(letter(i, g));
  }

  Word TruncatedFreeGroup::basic(std::size_t k) const {
    SHRINKLAB_REQUIRE(k < _rank, IndexOutOfRange, "basic commutator index out of range");
    std::vector<std::int64_t> e(_rank, 0);
    e[k] = 1 % modulus(_hall[k].weight);
    return Word(this, std::move(e));
  }

  Word TruncatedFreeGroup::reduce(std::vector<std::int64_t> exps) const {
    SHRINKLAB_REQUIRE(exps.size() == _rank, DimensionMismatch, "wrong exponent count");
    for (std::size_t k = 0; k < _rank; ++k) {
      exps[k] = floor_mod(exps[k], modulus(_hall[k].weight));
    }
    return Word(this, std::move(exps));
  }

  ////////////////////////////////////////////////////////////////////////
  // Series arithmetic
  ////////////////////////////////////////////////////////////////////////

  TruncatedFreeGroup::Series TruncatedFreeGroup::unit_series() const {
    Series s(std::size_t(_class) + 1);
    for (int t = 0; t <= _class; ++t) {
      s[t].assign(_pow_d[t], 0);
    }
    s[0][0] = 1;
    return s;
  }

  TruncatedFreeGroup::Series TruncatedFreeGroup::mul(Series const& a, Series const& b) const {
    Series r = unit_series();
    r[0][0]  = 0;
    for (int x = 0; x <= _class; ++x) {
      for (std::size_t i = 0; i < a[x].size(); ++i) {
        if (a[x][i] == 0) {
          continue;
        }
        for (int y = 0; x + y <= _class; ++y) {
          auto&       out  = r[x + y];
          std::size_t base = i * _pow_d[y];
          for (std::size_t j = 0; j < b[y].size(); ++j) {
            out[base + j] += a[x][i] * b[y][j];
          }
        }
      }
    }
    return r;
  }

  TruncatedFreeGroup::Series TruncatedFreeGroup::inv(Series const& a) const {
    // (1 + y)^-1 = sum (-y)^n
    Series neg = a;
    neg[0][0]  = 0;
    for (auto& level : neg) {
      for (auto& c : level) {
        c = -c;
      }
    }
    Series result = unit_series();
    Series term   = unit_series();
    for (int n = 1; n <= _class; ++n) {
      term = mul(term, neg);
      for (int t = 0; t <= _class; ++t) {
        for (std::size_t i = 0; i < term[t].size(); ++i) {
          result[t][i] += term[t][i];
        }
      }
    }
    return result;
  }

  TruncatedFreeGroup::Sparse TruncatedFreeGroup::factor_terms(std::size_t k, std::int64_t e) const {
    // c^e - 1 = sum_n C(e, n) Y^n
    Sparse out;
    for (std::size_t n = 0; n < _y_powers[k].size(); ++n) {
      std::int64_t const b = binomial(e, int(n) + 1);
      if (b == 0) {
        continue;
      }
      for (auto const& t : _y_powers[k][n]) {
        out.push_back({t.degree, t.index, t.coef * b});
      }
    }
    return out;
  }

  void TruncatedFreeGroup::right_mul_factor(Series& s, std::size_t k, std::int64_t e) const {
    if (e == 0) {
      return;
    }
    auto const terms = factor_terms(k, e);
    // descending target degree so every read sees the old lower degrees
    for (int t = _class; t >= 1; --t) {
      for (auto const& term : terms) {
        if (term.degree > t) {
          continue;
        }
        int const   a     = t - term.degree;
        std::size_t shift = _pow_d[term.degree];
        auto const& src   = s[a];
        auto&       dst   = s[t];
        for (std::size_t i = 0; i < src.size(); ++i) {
          if (src[i] != 0) {
            dst[i * shift + term.index] += term.coef * src[i];
          }
        }
      }
    }
  }

  void TruncatedFreeGroup::left_mul_factor(Series& s, std::size_t k, std::int64_t e) const {
    if (e == 0) {
      return;
    }
    auto const terms = factor_terms(k, e);
    for (int t = _class; t >= 1; --t) {
      for (auto const& term : terms) {
        if (term.degree > t) {
          continue;
        }
        int const   a    = t - term.degree;
        std::size_t base = term.index * _pow_d[a];
        auto const& src  = s[a];
        auto&       dst  = s[t];
        for (std::size_t i = 0; i < src.size(); ++i) {
          if (src[i] != 0) {
            dst[base + i] += term.coef * src[i];
          }
        }
      }
    }
  }

  void TruncatedFreeGroup::right_mul_word(Series& s, Word const& u, bool inverse) const {
    auto const& e = u.exponents();
    if (!inverse) {
      for (std::size_t k = 0; k < _rank; ++k) {
        right_mul_factor(s, k, e[k]);
      }
    } else {
      for (std::size_t k = _rank; k-- > 0;) {
        right_mul_factor(s, k, -e[k]);
      }
    }
  }

  TruncatedFreeGroup::Series TruncatedFreeGroup::to_series(Word const& u) const {
    check_parent(u);
    Series s = unit_series();
    right_mul_word(s, u, false);
    return s;
  }

  std::vector<std::int64_t> TruncatedFreeGroup::coordinates(Series s) const {
    std::vector<std::int64_t> exps(_rank, 0);
    for (int w = 1; w <= _class; ++w) {
      auto level = s[w];
      for (std::size_t k = _hall.begin_of(w); k < _hall.end_of(w); ++k) {
        std::int64_t const e = level[_word_index[k]];
        exps[k]              = e;
        if (e != 0) {
          for (auto [i, coef] : _lie[k]) {
            level[i] -= e * coef;
          }
        }
      }
      if (w < _class) {
        // strip this weight: s <- (prod_k c_k^e_k)^-1 s
        for (std::size_t k = _hall.begin_of(w); k < _hall.end_of(w); ++k) {
          left_mul_factor(s, k, -exps[k]);
        }
      }
    }
    return exps;
  }

  ////////////////////////////////////////////////////////////////////////
  // Group operations
  ////////////////////////////////////////////////////////////////////////

  Word TruncatedFreeGroup::multiply(Word const& u, Word const& v) const {
    check_parent(u);
    check_parent(v);
    Series s = unit_series();
    right_mul_word(s, u, false);
    right_mul_word(s, v, false);
    return reduce(coordinates(std::move(s)));
  }

  Word TruncatedFreeGroup::inverse(Word const& u) const {
    check_parent(u);
    Series s = unit_series();
    right_mul_word(s, u, true);
    return reduce(coordinates(std::move(s)));
  }

  Word TruncatedFreeGroup::power(Word const& u, std::int64_t n) const {
    check_parent(u);
    Word base = n < 0 ? inverse(u) : u;
    std::uint64_t k      = n < 0 ? std::uint64_t(-(n + 1)) + 1 : std::uint64_t(n);
    Word          result = identity();
    while (k > 0) {
      if (k & 1) {
        result = multiply(result, base);
      }
      k >>= 1;
      if (k > 0) {
        base = multiply(base, base);
      }
    }
    return result;
  }

  Word TruncatedFreeGroup::commutator(Word const& u, Word const& v) const {
    check_parent(u);
    check_parent(v);
    Series s = unit_series();
    right_mul_word(s, u, true);
    right_mul_word(s, v, true);
    right_mul_word(s, u, false);
    right_mul_word(s, v, false);
    return reduce(coordinates(std::move(s)));
  }

  Word TruncatedFreeGroup::g_act(Element g, Word const& u) const {
    check_parent(u);
    SHRINKLAB_REQUIRE(g < _group->order(), IndexOutOfRange, "element out of range");
    Series const s   = to_series(u);
    Series       out = unit_series();
    auto const&  pi  = _letter_perm[g];
    std::size_t const D = std::size_t(_letters);
    for (int t = 1; t <= _class; ++t) {
      for (std::size_t i = 0; i < s[t].size(); ++i) {
        if (s[t][i] == 0) {
          continue;
        }
        std::size_t rest = i;
        std::size_t j    = 0;
        std::size_t mult = 1;
        for (int pos = 0; pos < t; ++pos) {
          j += std::size_t(pi[rest % D]) * mult;
          rest /= D;
          mult *= D;
        }
        out[t][j] = s[t][i];
      }
    }
    return reduce(coordinates(std::move(out)));
  }

  bool TruncatedFreeGroup::filtration_member(Word const& u, FilterIndex mu) const {
    check_parent(u);
    SHRINKLAB_REQUIRE(mu.valid() && mu <= _nu_plus_1,
                      IndexOutOfRange,
                      to_string(mu) + " is outside the truncation " + to_string(_nu_plus_1));
    for (std::size_t k = 0; k < _rank; ++k) {
      if (u.exponents()[k] % modulus(mu, _hall[k].weight) != 0) {
        return false;
      }
    }
    return true;
  }

  void TruncatedFreeGroup::require_layer(FilterIndex nu) const {
    SHRINKLAB_REQUIRE(nu.valid() && nu.succ() <= _nu_plus_1,
                      IndexOutOfRange,
                      "layer " + to_string(nu) + " needs " + to_string(nu.succ()) +
                          " within the truncation " + to_string(_nu_plus_1));
  }

  FpVector TruncatedFreeGroup::layer_coords(Word const& u, FilterIndex nu) const {
    require_layer(nu);
    SHRINKLAB_REQUIRE(filtration_member(u, nu), InvalidArgument, "word is not in F^" + to_string(nu));
    std::int64_t const scale = ipow(_p, nu.i - nu.j);
    FpVector           out;
    for (std::size_t k = _hall.begin_of(nu.j); k < _hall.end_of(nu.j); ++k) {
      out.push_back(Residue(floor_mod(u.exponents()[k] / scale, _p)));
    }
    return out;
  }

  Word TruncatedFreeGroup::layer_basis_element(FilterIndex nu, std::size_t k) const {
    require_layer(nu);
    SHRINKLAB_REQUIRE(k < _hall.count(nu.j), IndexOutOfRange, "layer basis index out of range");
    return power(basic(_hall.begin_of(nu.j) + k), ipow(_p, nu.i - nu.j));
  }

  std::string TruncatedFreeGroup::dump() const {
    std::ostringstream out;
    out << "truncation p=" << _p << " d=" << _d << " G=" << _group->name()
        << " nu+1=" << to_string(_nu_plus_1) << "\n";
    out << "letters " << _letters << "\n";
    out << "moduli\n";
    for (int w = 1; w <= _hall.max_weight(); ++w) {
      out << "  weight " << w << ": m=" << modulus(w) << " count=" << _hall.count(w)
          << (modulus(w) == 1 ? " dropped" : "") << "\n";
    }
    out << "order " << _p << "^" << log_order() << "\n";
    out << "hall\n";
    for (std::size_t k = 0; k < _rank; ++k) {
      out << "  " << k << " w" << _hall[k].weight << " " << _hall.format(k) << "\n";
    }
    out << "letters (i,g)\n";
    for (int a = 0; a < _letters; ++a) {
      out << "  x" << a << " = x_{" << (std::size_t(a) / _group->order() + 1) << ","
          << (std::size_t(a) % _group->order()) << "}\n";
    }
    out << "action\n";
    for (Element g = 0; g < _group->order(); ++g) {
      out << "  " << g << ":";
      for (int a : _letter_perm[g]) {
        out << " " << a;
      }
      out << "\n";
    }
    return out.str();
  }

  TruncationPtr build_truncation(Residue        p,
                                 std::size_t    d,
                                 GroupPtr       group,
                                 FilterIndex    nu_plus_1,
                                 TruncationCaps caps) {
    return std::make_shared<TruncatedFreeGroup const>(p, d, std::move(group), nu_plus_1, caps);
  }

  ////////////////////////////////////////////////////////////////////////
  // Layers and the tensor surjection
  ////////////////////////////////////////////////////////////////////////

  FpGModule layer_module(TruncatedFreeGroup const& t, FilterIndex nu) {
    t.require_layer(nu);
    std::size_t const     dim = t.hall().count(nu.j);
    std::vector<Word>     basis;
    for (std::size_t k = 0; k < dim; ++k) {
      basis.push_back(t.layer_basis_element(nu, k));
    }
    std::vector<FpMatrix> action;
    for (Element s : t.group().generators()) {
      FpMatrix m(t.p(), dim, dim);
      for (std::size_t k = 0; k < dim; ++k) {
        auto col = t.layer_coords(t.g_act(s, basis[k]), nu);
        for (std::size_t r = 0; r < dim; ++r) {
          m(r, k) = col[r];
        }
      }
      action.push_back(std::move(m));
    }
    return FpGModule::from_generators(t.group_ptr(), t.p(), dim, action);
  }

  namespace {
    // [x_a1, [x_a2, [..., x_aj]]]
    Word right_normed(TruncatedFreeGroup const& t, std::vector<int> const& letters) {
      Word w = t.letter_word(letters.back());
      for (std::size_t k = letters.size() - 1; k-- > 0;) {
        w = t.commutator(t.letter_word(letters[k]), w);
      }
      return w;
    }
  }  // namespace

  FpMatrix theta_matrix(TruncatedFreeGroup const& t, FilterIndex nu) {
    t.require_layer(nu);
    std::size_t const D    = std::size_t(t.letters());
    std::size_t const rows = t.hall().count(nu.j);
    std::size_t       cols = 1;
    for (int k = 0; k < nu.j; ++k) {
      cols *= D;
    }
    std::int64_t scale = 1;
    for (int k = 0; k < nu.i - nu.j; ++k) {
      scale *= t.p();
    }
    FpMatrix         m(t.p(), rows, cols);
    std::vector<int> letters(std::size_t(nu.j));
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t rest = c;
      for (std::size_t pos = letters.size(); pos-- > 0;) {
        letters[pos] = int(rest % D);
        rest /= D;
      }
      auto v = t.layer_coords(t.power(right_normed(t, letters), scale), nu);
      for (std::size_t r = 0; r < rows; ++r) {
        m(r, c) = v[r];
      }
    }
    return m;
  }

  FpMatrix theta_section(FpMatrix const& theta) {
    Residue const     p = theta.p();
    FpMatrix          s(p, theta.cols(), theta.rows());
    std::vector<bool> covered(theta.rows(), false);
    std::size_t       left = theta.rows();
    for (std::size_t c = 0; c < theta.cols() && left > 0; ++c) {
      std::size_t nonzero = 0, row = 0;
      for (std::size_t r = 0; r < theta.rows() && nonzero < 2; ++r) {
        if (theta(r, c) != 0) {
          ++nonzero;
          row = r;
        }
      }
      if (nonzero == 1 && !covered[row]) {
        covered[row] = true;
        s(c, row)    = fp::inv(theta(row, c), p);
        --left;
      }
    }
    return left == 0 ? s : right_inverse(theta);
  }

  ModuleHom psi_nu_matrix(TruncatedFreeGroup const& t, FilterIndex nu) {
    t.require_layer(nu);
    auto v     = layer_module(t, {1, 1});
    auto layer = layer_module(t, nu);
    ModuleHom hom(tensor_power(v, std::size_t(nu.j)), layer, theta_matrix(t, nu));
    SHRINKLAB_REQUIRE(hom.is_surjective(),
                      SurjectivityFailure,
                      "tensor map onto layer " + to_string(nu) + " is not surjective");
    return hom;
  }

  ////////////////////////////////////////////////////////////////////////
  // Operator homomorphisms
  ////////////////////////////////////////////////////////////////////////

  Word OperatorHom::apply(Word const& u) const {
    SHRINKLAB_REQUIRE(u.parent() == source.get(), ParentMismatch, "word is not in the source");
    Word out = target->identity();
    for (std::size_t k = 0; k < source->rank(); ++k) {
      if (u.exponents()[k] != 0) {
        out = target->multiply(out, target->power(basic_images[k], u.exponents()[k]));
      }
    }
    return out;
  }

  FpMatrix OperatorHom::layer_map(FilterIndex nu) const {
    source->require_layer(nu);
    target->require_layer(nu);
    std::int64_t scale = 1;
    for (int k = 0; k < nu.i - nu.j; ++k) {
      scale *= source->p();
    }
    auto const&       hall = source->hall();
    std::size_t const cols = hall.count(nu.j);
    std::size_t const rows = target->hall().count(nu.j);
    FpMatrix          m(source->p(), rows, cols);
    for (std::size_t k = 0; k < cols; ++k) {
      auto img = target->power(basic_images[hall.begin_of(nu.j) + k], scale);
      auto v   = target->layer_coords(img, nu);
      for (std::size_t r = 0; r < rows; ++r) {
        m(r, k) = v[r];
      }
    }
    return m;
  }

  OperatorHom lift_operator_hom(FpMatrix const& psi_bar, TruncationPtr source, TruncationPtr target) {
    auto const& s = *source;
    auto const& t = *target;
    SHRINKLAB_REQUIRE(s.p() == t.p() && s.nu_plus_1() == t.nu_plus_1(),
                      InvalidArgument,
                      "truncations differ in p or nu+1");
    SHRINKLAB_REQUIRE(s.group_ptr() == t.group_ptr() || s.group() == t.group(),
                      GroupMismatch,
                      "truncations are over different groups");
    auto vm = layer_module(s, {1, 1});
    auto vn = layer_module(t, {1, 1});
    SHRINKLAB_REQUIRE(psi_bar.rows() == vn.dim() && psi_bar.cols() == vm.dim(),
                      DimensionMismatch,
                      "psi has the wrong shape");
    SHRINKLAB_REQUIRE(is_equivariant(vm, vn, psi_bar), NotEquivariant, "psi is not G-equivariant");
    SHRINKLAB_REQUIRE(rank(psi_bar) == vn.dim(), NotSurjective, "psi is not surjective");

    OperatorHom hom{source, target, {}, {}};
    hom.letter_images.resize(std::size_t(s.letters()));
    std::size_t const n = s.group().order();
    for (std::size_t i = 1; i <= s.d(); ++i) {
      int const                 a = s.letter(i, 0);
      std::vector<std::int64_t> e(t.rank(), 0);
      for (std::size_t b = 0; b < vn.dim(); ++b) {
        e[b] = psi_bar(b, std::size_t(a));
      }
      Word const base = t.reduce(std::move(e));
      for (Element g = 0; g < n; ++g) {
        hom.letter_images[std::size_t(s.letter(i, g))] = t.g_act(g, base);
      }
    }
    auto const& hall = s.hall();
    for (std::size_t k = 0; k < s.rank(); ++k) {
      auto const& c = hall[k];
      hom.basic_images.push_back(
          c.weight == 1 ? hom.letter_images[std::size_t(c.letter)]
                        : t.commutator(hom.basic_images[std::size_t(c.left)],
                                       hom.basic_images[std::size_t(c.right)]));
    }

    // psi_* theta(source) = theta(target) psi^(x)j on every layer
    for (FilterIndex nu{1, 1}; nu.succ() <= s.nu_plus_1(); nu = nu.succ()) {
      FpMatrix power = psi_bar;
      for (int k = 1; k < nu.j; ++k) {
        power = power.kron(psi_bar);
      }
      auto const lhs = hom.layer_map(nu) * theta_matrix(s, nu);
      auto const rhs = theta_matrix(t, nu) * power;
      SHRINKLAB_REQUIRE(lhs == rhs,
                        InternalVerifyFail,
                        "layer map does not commute with the tensor map at " + to_string(nu));
    }
    return hom;
  }

}  // namespace shrinklab

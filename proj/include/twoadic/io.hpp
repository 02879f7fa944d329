#pragma once

// Textual encodings and the job-file format.
//
// Elements of Z_{2^d}/2^M print as little-endian hex coefficient lists,
// e.g. "[0x29, 0x0, 0x0, 0x1]"; the context header is
// "d=4 M=10 modulus=[1,1,0,0,1]". Elements of F_{2^d} print as single hex
// integers with v -> 2 (so the bitmask is the value), the worked-example
// convention. Polynomials over F_{2^d} print lowest degree first.
//
// Job files are line-oriented "key = value" text; '#' starts a comment.
// Values are integers, hex integers, fractions "p/q", bracket lists, or
// nested bracket lists. Unknown keys are rejected.

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "twoadic/ode.hpp"

namespace twoadic {

// ---------------------------------------------------------------------------
// printing

inline std::string to_hex(uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << v;
    return os.str();
}

inline std::string encode_element(const Zq& x) {
    std::string s = "[";
    for (int i = 0; i < x.ctx()->d; ++i) {
        if (i) s += ", ";
        s += to_hex(x.coeffs()[size_t(i)]);
    }
    return s + "]";
}

inline std::string encode_context(const PrecisionContext& ctx) {
    std::string s = "d=" + std::to_string(ctx.d) + " M=" + std::to_string(ctx.M) + " modulus=[";
    for (int i = 0; i <= ctx.d; ++i) {
        if (i) s += ",";
        s += std::to_string(ctx.modulus[size_t(i)]);
    }
    return s + "]";
}

inline std::string encode_series(const Series& f) {
    std::string s = "n=" + std::to_string(f.length()) + " " + encode_context(*f.ctx()) + "\n[";
    for (int i = 0; i < f.length(); ++i) {
        if (i) s += ", ";
        if (f.ctx()->d == 1)
            s += to_hex(f.raw()[size_t(i)]);
        else
            s += encode_element(f.get(i));
    }
    return s + "]";
}

// hex digit string of a field element (v -> 2 convention: the bitmask value)
inline std::string gf_hex(gf x) {
    std::ostringstream os;
    os << std::uppercase << std::hex << x;
    return os.str();
}

// lowest-degree-first: "F + E*x + 7*x^2 + ... + x^36"
inline std::string print_poly_hex(const GFPoly& p, const std::string& var = "x") {
    if (p.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (int i = 0; i <= p.deg(); ++i) {
        gf c = p.coeff(i);
        if (!c) continue;
        if (!first) s += " + ";
        first = false;
        if (i == 0) {
            s += gf_hex(c);
        } else {
            if (c != 1) s += gf_hex(c) + "*";
            s += var;
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// job files

struct JobValue {
    std::string raw;                    // scalar text
    std::vector<JobValue> list;         // bracket list
    bool is_list = false;
};

struct JobFile {
    std::map<std::string, JobValue> kv;

    bool has(const std::string& k) const { return kv.count(k) != 0; }
    const JobValue& at(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end()) throw SchemaError("job file: missing key '" + k + "'");
        return it->second;
    }
};

namespace detail {

inline void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
}

inline JobValue parse_value(const std::string& s, size_t& i) {
    skip_ws(s, i);
    JobValue v;
    if (i < s.size() && s[i] == '[') {
        v.is_list = true;
        ++i;
        skip_ws(s, i);
        while (i < s.size() && s[i] != ']') {
            v.list.push_back(parse_value(s, i));
            skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                skip_ws(s, i);
            }
        }
        if (i >= s.size()) throw SchemaError("job file: unterminated list");
        ++i; // ']'
        return v;
    }
    size_t start = i;
    while (i < s.size() && s[i] != ',' && s[i] != ']' && !std::isspace((unsigned char)s[i])) ++i;
    v.raw = s.substr(start, i - start);
    if (v.raw.empty()) throw SchemaError("job file: empty value");
    return v;
}

inline long long parse_int(const std::string& s) {
    try {
        size_t pos = 0;
        long long r = (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
                          ? std::stoll(s.substr(2), &pos, 16)
                          : std::stoll(s, &pos, 10);
        return r;
    } catch (...) {
        throw SchemaError("job file: not an integer: '" + s + "'");
    }
}

} // namespace detail

inline JobFile parse_job_text(const std::string& text,
                              const std::set<std::string>& allowed_keys) {
    JobFile job;
    std::istringstream in(text);
    std::string line;
    std::string pending_key;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t i = 0;
        detail::skip_ws(line, i);
        if (i >= line.size()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw SchemaError("job file: expected 'key = value': " + line);
        std::string key = line.substr(0, eq);
        // trim
        while (!key.empty() && std::isspace((unsigned char)key.back())) key.pop_back();
        size_t ks = 0;
        detail::skip_ws(key, ks);
        key = key.substr(ks);
        if (key.empty()) throw SchemaError("job file: empty key");
        if (!allowed_keys.count(key)) throw SchemaError("job file: unknown key '" + key + "'");
        if (job.kv.count(key)) throw SchemaError("job file: duplicate key '" + key + "'");
        size_t vi = eq + 1;
        job.kv[key] = detail::parse_value(line, vi);
        detail::skip_ws(line, vi);
        if (vi < line.size()) throw SchemaError("job file: trailing text after value: " + line);
    }
    return job;
}

inline JobFile parse_job_file(const std::string& path, const std::set<std::string>& allowed_keys) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open job file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_job_text(ss.str(), allowed_keys);
}

inline long long job_int(const JobValue& v) {
    if (v.is_list) throw SchemaError("job file: expected a scalar");
    return detail::parse_int(v.raw);
}

inline std::shared_ptr<const PrecisionContext> job_context(const JobFile& job, int n_for_M) {
    int d = int(job_int(job.at("d")));
    std::vector<int> modulus;
    if (job.has("modulus")) {
        for (const auto& e : job.at("modulus").list) modulus.push_back(int(job_int(e)));
    } else {
        modulus = modulus_lift_from_bits(d, gf2_modulus_bits(d));
    }
    int M;
    if (job.has("M"))
        M = int(job_int(job.at("M")));
    else if (job.has("N"))
        M = required_precision(int(job_int(job.at("N"))), std::max(1, n_for_M));
    else
        throw SchemaError("job file: need M or N");
    return make_context(d, M, std::move(modulus));
}

// element from either a flat hex scalar (d = 1) or a coefficient list
inline Zq job_element(const PrecisionContext* ctx, const JobValue& v) {
    std::vector<uint64_t> c(size_t(ctx->d), 0);
    if (!v.is_list) {
        long long x = detail::parse_int(v.raw);
        return Zq::from_int(ctx, x);
    }
    if ((int)v.list.size() > ctx->d) throw SchemaError("element has too many coefficients");
    bool negative_seen = false;
    for (size_t i = 0; i < v.list.size(); ++i) {
        long long x = job_int(v.list[i]);
        if (x < 0) negative_seen = true;
        c[i] = uint64_t(x);
    }
    Zq r(ctx, std::move(c));
    if (negative_seen) {
        // re-read with signed semantics coefficientwise
        Zq acc = Zq::zero(ctx);
        for (size_t i = 0; i < v.list.size(); ++i) {
            Zq unit = Zq::zero(ctx);
            std::vector<uint64_t> e(size_t(ctx->d), 0);
            e[i] = 1;
            Zq basis(ctx, std::move(e));
            acc = acc + basis * Zq::from_int(ctx, job_int(v.list[i]));
        }
        return acc;
    }
    return r;
}

inline Series job_series(const PrecisionContext* ctx, const JobValue& v, int n) {
    if (!v.is_list) throw SchemaError("series value must be a list");
    Series s(ctx, n);
    for (size_t i = 0; i < v.list.size() && int(i) < n; ++i) s.set(int(i), job_element(ctx, v.list[i]));
    return s;
}

inline mpq_class job_rational(const JobValue& v) {
    if (v.is_list) throw SchemaError("expected a rational scalar");
    auto slash = v.raw.find('/');
    if (slash == std::string::npos) return mpq_class(long(detail::parse_int(v.raw)));
    mpq_class r(mpq_class(long(detail::parse_int(v.raw.substr(0, slash)))) /
                mpq_class(long(detail::parse_int(v.raw.substr(slash + 1)))));
    return r;
}

} // namespace twoadic

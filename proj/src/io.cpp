#include "wach/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wach {

std::string padic_to_machine(const PAdic& x) {
    return x.machine();
}

PAdic padic_from_machine(int64_t p, const std::string& line) {
    std::istringstream is(line);
    long long v;
    std::string u;
    int n;
    if (!(is >> v >> u >> n)) throw ParseError("bad p-adic record: " + line);
    if (u == "0" && n == 0) return PAdic::zero(p, static_cast<int>(v));
    auto digits = base_p_from_decimal(p, u, n);
    return PAdic::from_unit_digits(p, static_cast<int>(v), std::move(digits));
}

void write_series(std::ostream& os, const PiSeries& f, int N) {
    os << "piseries 1\n";
    os << "p " << f.prime() << " D " << f.trunc_deg() << " N " << N
       << " drel " << f.reliable_deg() << "\n";
    for (int j = 0; j <= f.trunc_deg(); ++j) {
        PAdic c = f.coeff(j);
        if (c.is_zero()) c = c.cap_abs(N);
        else if (c.rel_prec() > N) c = c.cap_rel(N);
        os << padic_to_machine(c) << "\n";
    }
}

PiSeries read_series(std::istream& is) {
    std::string tag;
    int version;
    if (!(is >> tag >> version) || tag != "piseries") throw ParseError("not a series record");
    std::string kp, kd, kn, kdrel;
    int64_t p;
    int D, N, drel;
    if (!(is >> kp >> p >> kd >> D >> kn >> N >> kdrel >> drel))
        throw ParseError("bad series header");
    is.ignore();
    PiSeries f(p, D);
    for (int j = 0; j <= D; ++j) {
        std::string line;
        if (!std::getline(is, line)) throw ParseError("series record truncated");
        f.set_coeff(j, padic_from_machine(p, line));
    }
    return f.with_reliable(drel);
}

void write_iwasawa(std::ostream& os, const IwasawaElement& x, int N) {
    os << "iwasawa 1\n";
    os << "p " << x.prime() << " X " << x.trunc() << " N " << N
       << " bounded " << (x.bounded() ? 1 : 0) << "\n";
    for (int a = 0; a < x.grades(); ++a)
        for (int l = 0; l <= x.trunc(); ++l) {
            PAdic c = x.coeff(a, l);
            if (c.is_zero()) c = c.cap_abs(N);
            else if (c.rel_prec() > N) c = c.cap_rel(N);
            os << a << " " << l << " " << padic_to_machine(c) << "\n";
        }
}

IwasawaElement read_iwasawa(std::istream& is) {
    std::string tag;
    int version;
    if (!(is >> tag >> version) || tag != "iwasawa") throw ParseError("not an iwasawa record");
    std::string kp, kx, kn, kb;
    int64_t p;
    int X, N, bounded;
    if (!(is >> kp >> p >> kx >> X >> kn >> N >> kb >> bounded))
        throw ParseError("bad iwasawa header");
    IwasawaElement x(p, X, bounded != 0);
    int rows = (static_cast<int>(p) - 1) * (X + 1);
    for (int r = 0; r < rows; ++r) {
        int a, l;
        long long v;
        std::string u;
        int n;
        if (!(is >> a >> l >> v >> u >> n)) throw ParseError("iwasawa record truncated");
        std::ostringstream rec;
        rec << v << " " << u << " " << n;
        x.set_coeff(a, l, padic_from_machine(p, rec.str()));
    }
    return x;
}

void write_cyc(std::ostream& os, const CycElt& x, int N) {
    os << "cyc 1\n";
    os << "p " << x.prime() << " level " << x.level() << "\n";
    for (int i = 0; i < x.dim(); ++i) {
        PAdic c = x.coord(i);
        if (c.is_zero()) c = c.cap_abs(N);
        else if (c.rel_prec() > N) c = c.cap_rel(N);
        os << padic_to_machine(c) << "\n";
    }
}

CycElt read_cyc(std::istream& is) {
    std::string tag;
    int version;
    if (!(is >> tag >> version) || tag != "cyc") throw ParseError("not a cyc record");
    std::string kp, kl;
    int64_t p;
    int level;
    if (!(is >> kp >> p >> kl >> level)) throw ParseError("bad cyc header");
    is.ignore();
    CycElt x(p, level);
    std::vector<PAdic> coords;
    for (int i = 0; i < x.dim(); ++i) {
        std::string line;
        if (!std::getline(is, line)) throw ParseError("cyc record truncated");
        coords.push_back(padic_from_machine(p, line));
    }
    return CycElt::from_coords(p, level, std::move(coords));
}

std::string context_to_json(const WachContext& ctx) {
    nlohmann::json j;
    j["p"] = ctx.p;
    j["k"] = ctx.k;
    j["ap"] = padic_to_machine(ctx.ap.is_zero() ? ctx.ap : ctx.ap.cap_rel(ctx.budget.N));
    j["mode"] = ctx.mode == WachMode::supersingular ? "supersingular" : "ordinary";
    j["m"] = ctx.m;
    j["delta"] = padic_to_machine(ctx.delta.is_zero() ? ctx.delta : ctx.delta.cap_rel(ctx.budget.N));
    nlohmann::json z = nlohmann::json::array();
    for (int i = 0; i <= ctx.k - 2 && i <= ctx.z.trunc_deg(); ++i) {
        PAdic c = ctx.z.coeff(i);
        z.push_back(padic_to_machine(c.is_zero() ? c : c.cap_rel(ctx.budget.N)));
    }
    j["z"] = z;
    auto ser = [&](const PiSeries& f) {
        std::ostringstream os;
        write_series(os, f, ctx.budget.N);
        return os.str();
    };
    j["P"] = {{"a", ser(ctx.P.a)}, {"b", ser(ctx.P.b)}, {"c", ser(ctx.P.c)}, {"d", ser(ctx.P.d)}};
    auto sca = [&](const PAdic& c) { return padic_to_machine(c.is_zero() ? c : c.cap_rel(ctx.budget.N)); };
    j["Aphi"] = {{"a", sca(ctx.Aphi.a)}, {"b", sca(ctx.Aphi.b)}, {"c", sca(ctx.Aphi.c)}, {"d", sca(ctx.Aphi.d)}};
    j["budget"] = {{"N", ctx.budget.N}, {"D", ctx.budget.D}, {"X", ctx.budget.X},
                   {"n_max", ctx.budget.n_max}, {"tower", ctx.budget.tower}};
    j["assumptions"] = {{"A", ctx.flags.a}, {"B", ctx.flags.b}, {"C", ctx.flags.c}, {"D", ctx.flags.d}};
    return j.dump(2);
}

void write_series_file(const std::string& path, const PiSeries& f, int N) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_series(os, f, N);
}

PiSeries read_series_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open " + path);
    return read_series(is);
}

void write_iwasawa_file(const std::string& path, const IwasawaElement& x, int N) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_iwasawa(os, x, N);
}

IwasawaElement read_iwasawa_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open " + path);
    return read_iwasawa(is);
}

} // namespace wach

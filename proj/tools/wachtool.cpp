// wachtool: batch front-end for the p-adic power-series machinery.
// Every command is a thin composition of library operations; outputs are
// deterministic text records.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "wach/checks.hpp"
#include "wach/io.hpp"

using namespace wach;

namespace {

struct CommonOpts {
    int64_t p = 3;
    int k = 2;
    std::string ap = "0";
    int N = 16;
    int D = 96;
    int X = 8;
    int n_max = 3;
    int tower = 2;
    uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_context = true) {
    cmd->add_option("--p", o.p, "odd prime")->capture_default_str();
    if (with_context) {
        cmd->add_option("--k", o.k, "weight (k >= 2)")->capture_default_str();
        cmd->add_option("--ap", o.ap, "a_p as a decimal string (optionally a/b)")->capture_default_str();
    }
    cmd->add_option("--N", o.N, "relative p-adic precision")->capture_default_str();
    cmd->add_option("--deg", o.D, "pi-truncation degree")->capture_default_str();
    cmd->add_option("--X", o.X, "T-truncation degree")->capture_default_str();
    cmd->add_option("--n-max", o.n_max, "product cutoff floor for half-logarithms")->capture_default_str();
    cmd->add_option("--tower", o.tower, "cyclotomic tower height")->capture_default_str();
    cmd->add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
}

PrecisionBudget budget_of(const CommonOpts& o) {
    if (o.N < 1 || o.D < 1 || o.X < 1 || o.tower < 1 || o.tower > 3)
        throw ConfigError("invalid precision budget");
    if (o.D < static_cast<int>(o.p) * o.X)
        throw ConfigError("need deg >= p * X");
    PrecisionBudget b;
    b.N = o.N;
    b.D = o.D;
    b.X = o.X;
    b.n_max = o.n_max;
    b.tower = o.tower;
    return b;
}

WachContext context_of(const CommonOpts& o) {
    PAdic ap = PAdic::from_decimal(o.p, o.ap, 2 * o.N + 3 * o.k + 28);
    return build_context(o.p, o.k, ap, budget_of(o));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    return os;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic power-series and Wach-module calculator"};
    app.require_subcommand(1);

    CommonOpts o;

    // special-series
    std::string name = "q", out = "";
    auto* sser = app.add_subcommand("special-series", "write a distinguished series");
    add_common(sser, o, false);
    sser->add_option("--name", name, "q | phi_pi | t | t_over_pi | log_plus | log_minus | pi0")
        ->capture_default_str();
    sser->add_option("--out", out, "output file (default: stdout)");

    // build-context
    auto* bctx = app.add_subcommand("build-context", "assemble and dump a context");
    add_common(bctx, o);
    bctx->add_option("--out", out, "output file (default: stdout)");

    // coleman
    std::string in1, in2, out2;
    auto* col = app.add_subcommand("coleman", "Coleman maps of a coordinate pair");
    add_common(col, o);
    col->add_option("--x1", in1, "first coordinate (series file)")->required();
    col->add_option("--x2", in2, "second coordinate (series file)")->required();
    col->add_option("--out1", out, "first output")->required();
    col->add_option("--out2", out2, "second output")->required();

    // fixed-point
    auto* fxp = app.add_subcommand("fixed-point", "solve (1-phi)x = y with psi(x) = x");
    add_common(fxp, o);
    fxp->add_option("--y1", in1, "first coordinate of y (series file)")->required();
    fxp->add_option("--y2", in2, "second coordinate of y (series file)")->required();
    fxp->add_option("--out1", out, "x1 output")->required();
    fxp->add_option("--out2", out2, "x2 output")->required();

    // mellin / inv-mellin
    auto* mel = app.add_subcommand("mellin", "apply the measure to 1+pi");
    add_common(mel, o, false);
    mel->add_option("--in", in1, "iwasawa element file")->required();
    mel->add_option("--out", out, "series output")->required();

    auto* imel = app.add_subcommand("inv-mellin", "invert the transform on a psi=0 series");
    add_common(imel, o, false);
    imel->add_option("--in", in1, "series file")->required();
    imel->add_option("--out", out, "iwasawa output")->required();

    // pollack-logs
    std::string variant = "plus";
    auto* plog = app.add_subcommand("pollack-logs", "half-logarithms in the weight variable");
    add_common(plog, o);
    plog->add_option("--variant", variant, "plus | minus | ord")->capture_default_str();
    plog->add_option("--out", out, "output file (default: stdout)");

    // sprung
    int sp_n = 3, sp_i = 0;
    bool sp_limit = false;
    auto* spr = app.add_subcommand("sprung", "weight-2 matrix products");
    add_common(spr, o);
    spr->add_option("--steps", sp_n, "number of factors")->capture_default_str();
    spr->add_option("--index", sp_i, "normalization index")->capture_default_str();
    spr->add_option("--variant", variant, "A | B")->capture_default_str();
    spr->add_flag("--limit", sp_limit, "stabilized normalized limit (variant B)");
    spr->add_option("--out", out, "output file (default: stdout)");

    // iwasawa-transform
    auto* itr = app.add_subcommand("iwasawa-transform", "order-reduction transform of a coordinate pair");
    add_common(itr, o);
    itr->add_option("--y1", in1, "first coordinate (series file)")->required();
    itr->add_option("--y2", in2, "second coordinate (series file)")->required();
    itr->add_option("--out1", out, "first output")->required();
    itr->add_option("--out2", out2, "second output")->required();

    // decompose
    std::string inar, inaa, inbr, inba;
    auto* dec = app.add_subcommand("decompose", "recover the bounded pair from the two transforms");
    add_common(dec, o);
    dec->add_option("--lalpha-r", inar, "rational part of L_alpha (iwasawa file)")->required();
    dec->add_option("--lalpha-a", inaa, "alpha part of L_alpha")->required();
    dec->add_option("--lbeta-r", inbr, "rational part of L_beta")->required();
    dec->add_option("--lbeta-a", inba, "alpha part of L_beta")->required();
    dec->add_option("--out1", out, "L1 output (series)")->required();
    dec->add_option("--out2", out2, "L2 output (series)")->required();

    // ordinary-decompose
    std::string instar, inunit;
    auto* odec = app.add_subcommand("ordinary-decompose", "weight-space decomposition, ordinary case");
    add_common(odec, o);
    odec->add_option("--l1", in1, "L1 (iwasawa file)")->required();
    odec->add_option("--l2", in2, "L2 (iwasawa file)")->required();
    odec->add_option("--star", instar, "star entry (iwasawa file; default 0)");
    odec->add_option("--unit", inunit, "unit entry (iwasawa file; default 1)");
    odec->add_option("--out1", out, "L_beta output")->required();
    odec->add_option("--out2", out2, "L_alpha output")->required();

    // fourier-check
    int level = 1;
    auto* fch = app.add_subcommand("fourier-check", "divisibility/vanishing predicate report");
    add_common(fch, o, false);
    fch->add_option("--in", in1, "series file")->required();
    fch->add_option("--level", level, "tower level")->capture_default_str();

    // invariants
    int instances = 25;
    auto* inv = app.add_subcommand("invariants", "run the named identity battery");
    add_common(inv, o);
    inv->add_option("--instances", instances, "randomized instances per family")->capture_default_str();
    inv->add_option("--out", out, "report file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        auto emit_series = [&](const PiSeries& f) {
            if (out.empty()) {
                write_series(std::cout, f, o.N);
            } else {
                auto os = open_out(out);
                write_series(os, f, o.N);
            }
        };

        if (sser->parsed()) {
            PrecisionBudget b = budget_of(o);
            int wp = o.N + 8;
            PiSeries f(o.p, b.D);
            if (name == "q") f = series_q(o.p, b.D, wp);
            else if (name == "phi_pi") f = series_phi_pi(o.p, b.D, wp);
            else if (name == "t") f = series_t(o.p, b.D, wp);
            else if (name == "t_over_pi") f = series_t_over_pi(o.p, b.D, wp);
            else if (name == "log_plus") f = series_lambda_plus(o.p, b.D, o.N, o.n_max > 3 ? o.n_max : 0);
            else if (name == "log_minus") f = series_lambda_minus(o.p, b.D, o.N, o.n_max > 3 ? o.n_max : 0);
            else if (name == "pi0") f = series_pi0(o.p, b.D, wp);
            else throw ConfigError("unknown series name: " + name);
            emit_series(f);
            return 0;
        }
        if (bctx->parsed()) {
            WachContext ctx = context_of(o);
            std::string j = context_to_json(ctx);
            if (out.empty()) std::cout << j << "\n";
            else open_out(out) << j << "\n";
            return 0;
        }
        if (col->parsed()) {
            WachContext ctx = context_of(o);
            ModuleVec x{read_series_file(in1), read_series_file(in2), 0};
            auto cc = coleman(x, ctx);
            write_series_file(out, cc.first, o.N);
            write_series_file(out2, cc.second, o.N);
            return 0;
        }
        if (fxp->parsed()) {
            WachContext ctx = context_of(o);
            ModuleVec x = fixed_point(read_series_file(in1), read_series_file(in2), ctx);
            write_series_file(out, x.x1, o.N);
            write_series_file(out2, x.x2, o.N);
            return 0;
        }
        if (mel->parsed()) {
            IwasawaElement z = read_iwasawa_file(in1);
            MellinContext mc(o.p, std::max(o.D, static_cast<int>(o.p) * (z.trunc() + 1)), z.trunc() + 1, o.N);
            write_series_file(out, mc.mellin(z), o.N);
            return 0;
        }
        if (imel->parsed()) {
            PiSeries F = read_series_file(in1);
            MellinContext mc(o.p, F.trunc_deg(), o.X, o.N);
            IwasawaElement z = mc.inv_mellin(F, false);
            write_iwasawa_file(out, z, o.N);
            return 0;
        }
        if (plog->parsed()) {
            LogVariant v = variant == "plus" ? LogVariant::plus
                         : variant == "minus" ? LogVariant::minus
                         : variant == "ord" ? LogVariant::ord
                                            : throw ConfigError("unknown variant: " + variant);
            IwasawaElement z = pollack_log(o.p, o.k, v, o.X, o.N, o.n_max > 3 ? o.n_max : 0);
            if (out.empty()) write_iwasawa(std::cout, z, o.N);
            else { auto os = open_out(out); write_iwasawa(os, z, o.N); }
            return 0;
        }
        if (spr->parsed()) {
            WachContext ctx = context_of(o);
            std::ostringstream buf;
            if (variant == "B") {
                MatSeries m = sp_limit ? sprung_limit_B(ctx, sp_i) : sprung_product_B(ctx, sp_n, sp_i);
                for (const PiSeries* e : {&m.a, &m.b, &m.c, &m.d}) write_series(buf, *e, o.N);
            } else if (variant == "A") {
                MatIwasawa m = sprung_product_A(ctx, sp_n, sp_i, o.X);
                for (const IwasawaElement* e : {&m.a, &m.b, &m.c, &m.d}) write_iwasawa(buf, *e, o.N);
            } else {
                throw ConfigError("unknown variant: " + variant);
            }
            if (out.empty()) std::cout << buf.str();
            else open_out(out) << buf.str();
            return 0;
        }
        if (itr->parsed()) {
            WachContext ctx = context_of(o);
            IwasawaTransform J(ctx, o.X, o.N + 2);
            auto z = J.transform(read_series_file(in1), read_series_file(in2));
            write_iwasawa_file(out, z.first, o.N);
            write_iwasawa_file(out2, z.second, o.N);
            return 0;
        }
        if (dec->parsed()) {
            WachContext ctx = context_of(o);
            MellinContext mc(o.p, o.D, o.X, o.N + 2);
            QuadIw La{read_iwasawa_file(inar), read_iwasawa_file(inaa)};
            QuadIw Lb{read_iwasawa_file(inbr), read_iwasawa_file(inba)};
            auto rec = decompose(ctx, mc, La, Lb);
            write_series_file(out, rec.first, o.N);
            write_series_file(out2, rec.second, o.N);
            return 0;
        }
        if (odec->parsed()) {
            WachContext ctx = context_of(o);
            IwasawaElement L1 = read_iwasawa_file(in1);
            IwasawaElement L2 = read_iwasawa_file(in2);
            IwasawaElement star = instar.empty() ? IwasawaElement::zero(o.p, L1.trunc())
                                                 : read_iwasawa_file(instar);
            IwasawaElement unit = inunit.empty() ? IwasawaElement::one(o.p, L1.trunc(), o.N + 6)
                                                 : read_iwasawa_file(inunit);
            auto r = ordinary_decompose(ctx, L1, L2, star, unit);
            write_iwasawa_file(out, r.first, o.N);
            write_iwasawa_file(out2, r.second, o.N);
            return 0;
        }
        if (fch->parsed()) {
            PiSeries F = read_series_file(in1);
            FourierChecker checker(o.p, 0, o.N, 16, o.tower);
            FourierReport r = checker.run(F, level);
            std::cout << "level " << r.level << "\n";
            std::cout << "series-divisibility " << (r.div_series ? "yes" : "no")
                      << " (val " << r.val_series << " / tol " << r.tol_series << ")\n";
            std::cout << "character-vanishing " << (r.char_vanish ? "yes" : "no")
                      << " (val " << r.val_char << " / tol " << r.tol_char << ")\n";
            std::cout << "weight-side-divisibility " << (r.div_tside ? "yes" : "no")
                      << " (val " << r.val_tside << " / tol " << r.tol_tside << ")\n";
            std::cout << "unanimous " << (r.unanimous ? "yes" : "no") << "\n";
            return r.unanimous ? 0 : 5;
        }
        if (inv->parsed()) {
            PAdic ap = PAdic::from_decimal(o.p, o.ap, 2 * o.N + 3 * o.k + 28);
            auto results = run_invariant_suite(o.p, o.k, ap, budget_of(o), o.seed, instances);
            std::ostringstream buf;
            for (const auto& r : results) {
                buf << (r.pass ? "PASS" : "FAIL") << " " << r.name << " residual=" << r.residual;
                if (!r.note.empty()) buf << " (" << r.note << ")";
                buf << "\n";
            }
            if (out.empty()) std::cout << buf.str();
            else open_out(out) << buf.str();
            return all_pass(results) ? 0 : 5;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return 3;
    } catch (const NotDivisible& e) {
        std::cerr << "precision/divisibility: " << e.what() << "\n";
        return 3;
    } catch (const AllZero& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return 3;
    } catch (const NoConvergence& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 4;
    } catch (const SolveFailed& e) {
        std::cerr << "internal solve failure: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

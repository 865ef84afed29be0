#pragma once

#include <iosfwd>
#include <string>

#include "wach/cyclotomic.hpp"
#include "wach/iwasawa.hpp"
#include "wach/wach_module.hpp"

namespace wach {

// Line-oriented text records. Numbers are decimal; a PAdic travels as
// "v u N" (unit as a decimal string), zeros as "v 0 0".

std::string padic_to_machine(const PAdic& x);
PAdic padic_from_machine(int64_t p, const std::string& line);

void write_series(std::ostream& os, const PiSeries& f, int N);
PiSeries read_series(std::istream& is);

void write_iwasawa(std::ostream& os, const IwasawaElement& x, int N);
IwasawaElement read_iwasawa(std::istream& is);

void write_cyc(std::ostream& os, const CycElt& x, int N);
CycElt read_cyc(std::istream& is);

std::string context_to_json(const WachContext& ctx);

void write_series_file(const std::string& path, const PiSeries& f, int N);
PiSeries read_series_file(const std::string& path);
void write_iwasawa_file(const std::string& path, const IwasawaElement& x, int N);
IwasawaElement read_iwasawa_file(const std::string& path);

} // namespace wach

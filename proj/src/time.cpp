#include "carbonsched/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace carbonsched {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  int digits(std::size_t count) {
    if (pos_ + count > text_.size()) fail();
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const char c = text_[pos_ + i];
      if (!std::isdigit(static_cast<unsigned char>(c))) fail();
      value = value * 10 + (c - '0');
    }
    pos_ += count;
    return value;
  }

  void expect(char c) {
    if (!accept(c)) fail();
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool at_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  bool done() const { return pos_ == text_.size(); }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail() const {
    throw std::invalid_argument("malformed timestamp '" + std::string(text_) + "'");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  Cursor in(text);
  const int y = in.digits(4);
  in.expect('-');
  const int mo = in.digits(2);
  in.expect('-');
  const int d = in.digits(2);
  if (!in.accept('T') && !in.accept(' ')) in.fail();
  const int hh = in.digits(2);
  in.expect(':');
  const int mm = in.digits(2);
  int ss = 0;
  if (in.accept(':')) {
    ss = in.digits(2);
    if (in.accept('.')) {
      if (!in.at_digit()) in.fail();
      while (in.at_digit()) in.digits(1);
    }
  }

  int offset_minutes = 0;
  if (in.accept('Z') || in.accept('z')) {
  } else if (in.peek() == '+' || in.peek() == '-') {
    const int sign = in.peek() == '-' ? -1 : 1;
    in.accept(in.peek());
    const int oh = in.digits(2);
    int om = 0;
    if (in.accept(':')) {
      om = in.digits(2);
    } else if (in.at_digit()) {
      om = in.digits(2);
    }
    if (oh > 23 || om > 59) in.fail();
    offset_minutes = sign * (oh * 60 + om);
  } else {
    in.fail();
  }
  if (!in.done()) in.fail();

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) in.fail();

  const sys_seconds local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
  return local - minutes{offset_minutes};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const sys_days day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<seconds> tod{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

}  // namespace carbonsched

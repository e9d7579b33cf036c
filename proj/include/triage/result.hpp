#ifndef TRIAGE_RESULT_HPP
#define TRIAGE_RESULT_HPP

#include <cassert>
#include <utility>
#include <variant>

namespace triage {

// Minimal ok-or-error carrier, value semantics throughout.
template <typename T, typename E>
class Result {
  public:
    static Result ok(T value) { return Result(std::in_place_index<0>, std::move(value)); }
    static Result err(E error) { return Result(std::in_place_index<1>, std::move(error)); }

    bool is_ok() const { return data_.index() == 0; }
    bool is_err() const { return data_.index() == 1; }
    explicit operator bool() const { return is_ok(); }

    T &value() {
        assert(is_ok());
        return std::get<0>(data_);
    }
    const T &value() const {
        assert(is_ok());
        return std::get<0>(data_);
    }
    E &error() {
        assert(is_err());
        return std::get<1>(data_);
    }
    const E &error() const {
        assert(is_err());
        return std::get<1>(data_);
    }

    T take() { return std::move(std::get<0>(data_)); }

  private:
    template <size_t I, typename V>
    Result(std::in_place_index_t<I> tag, V &&v) : data_(tag, std::forward<V>(v)) {}

    std::variant<T, E> data_;
};

}  // namespace triage

#endif

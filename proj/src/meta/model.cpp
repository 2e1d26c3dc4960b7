#include "nim/meta/model.hpp"

#include <algorithm>
#include <tuple>

namespace nim::meta {

void Entry::insert(TimedValue v) {
    auto key = [](const TimedValue& x) { return std::tuple(x.timestamp, x.ingestSeq); };
    auto it = std::upper_bound(values.begin(), values.end(), v,
                               [&](const TimedValue& a, const TimedValue& b) { return key(a) < key(b); });
    values.insert(it, std::move(v));
}

const std::string& Component::name() const {
    return is_category() ? category().name : entry().name;
}

Component* Category::find_child(std::string_view child) {
    auto it = std::find_if(children.begin(), children.end(), [&](const Component& c) { return c.name() == child; });
    return it == children.end() ? nullptr : &*it;
}

const Component* Category::find_child(std::string_view child) const {
    return const_cast<Category*>(this)->find_child(child);
}

Entry* Category::find_entry(std::string_view child) {
    Component* c = find_child(child);
    return c && c->is_entry() ? &c->entry() : nullptr;
}

const Entry* Category::find_entry(std::string_view child) const {
    return const_cast<Category*>(this)->find_entry(child);
}

Category* Category::find_category(std::string_view child) {
    Component* c = find_child(child);
    return c && c->is_category() ? &c->category() : nullptr;
}

const Category* Category::find_category(std::string_view child) const {
    return const_cast<Category*>(this)->find_category(child);
}

Component& Category::add(Component child) {
    if (find_child(child.name()))
        throw NimError(ErrorCode::Conflict, "category '" + name + "' already has a child named '" + child.name() + "'");
    children.push_back(std::move(child));
    return children.back();
}

} // namespace nim::meta

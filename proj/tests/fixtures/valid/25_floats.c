double half(double x) {
    return x / 2.0;
}

int main() {
    float f = 1.5;
    double d = half(3.25e1);
    return d > f;
}

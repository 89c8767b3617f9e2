int main() {
    int k = 0;
    for (;;) {
        k++;
        if (k > 3) break;
    }
    return k;
}

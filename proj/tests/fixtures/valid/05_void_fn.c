void shout(int n) {
    printf("%d\n", n);
}

int main() {
    shout(3);
    return 0;
}

public class CollatzSteps {
    public static int main(String[] args) {
        int n = 6;
        int steps = 0;
        int peak = n;
        do {
            n = n % 2 == 0 ? n / 2 : 3 * n + 1;
            peak = Math.max(peak, n);
            steps++;
        } while (n != 1);
        return steps;
    }
}
